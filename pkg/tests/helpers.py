"""Shared test utilities: seeded random systems and regression anchors.

The ``REF_*`` tables are known consistent distributions for the bundled
brain-diagnostic example (data/brain.json), pruned to the AD query.
Labels give the truth values of (AD, BA, CA) left to right, e.g. "101"
is the world where AD and CA hold but BA does not.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from holex import Model, MultiModelSystem, ProbEntry, final_outputs

REF_OPTIMISTIC = {
    "000": 0.0, "001": 0.02, "010": 0.0, "011": 0.28,
    "100": 0.15, "101": 0.13, "110": 0.25, "111": 0.17,
}
REF_PESSIMISTIC = {
    "000": 0.14, "001": 0.16, "010": 0.14, "011": 0.14,
    "100": 0.0, "101": 0.0, "110": 0.12, "111": 0.3,
}
REF_LAPLACE = {
    "000": 0.058, "001": 0.114, "010": 0.094, "011": 0.186,
    "100": 0.058, "101": 0.07, "110": 0.19, "111": 0.23,
}

LABEL_ATOMS = ("AD", "BA", "CA")


def label_assignment(label: str) -> dict[str, bool]:
    return {atom: char == "1" for atom, char in zip(LABEL_ATOMS, label)}


def table_as_probs(table: dict[str, float], atoms: tuple[str, ...]) -> np.ndarray:
    """Re-index a labelled table onto the world order of ``atoms``."""
    probs = np.zeros(1 << len(atoms))
    for label, value in table.items():
        assignment = label_assignment(label)
        bits = 0
        for i, atom in enumerate(atoms):
            if assignment[atom]:
                bits |= 1 << i
        probs[bits] = value
    return probs


def _random_theta(rng: np.random.Generator) -> float:
    if rng.random() < 0.1:
        return float(rng.integers(0, 2))
    return round(float(rng.uniform(0.02, 0.98)), 2)


def random_system(seed: int) -> MultiModelSystem:
    """A small random valid system: one output per model, DAG by layering.

    At most 4 atoms and 6 table entries.  Tables may be partial, bodies
    may pair up, and thetas occasionally hit 0 or 1, so the feasible
    polytopes exercise degenerate faces too.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    budget = 6
    total = 0
    models: list[Model] = []
    for i in range(n):
        parents: list[int] = []
        if i:
            k = int(rng.integers(0, min(2, i) + 1))
            if k:
                parents = sorted(rng.choice(i, size=k, replace=False).tolist())
        internal = tuple(f"S{j}" for j in parents)
        externals = [f"E{i}"]
        entries: list[ProbEntry] = []
        if total < budget and rng.random() < 0.8:
            entries.append(ProbEntry(f"S{i}", (externals[0],), _random_theta(rng)))
            total += 1
        if total < budget and internal and rng.random() < 0.9:
            entries.append(ProbEntry(f"S{i}", internal, _random_theta(rng)))
            total += 1
        if total < budget and len(internal) == 2 and rng.random() < 0.5:
            entries.append(ProbEntry(f"S{i}", internal[:1], _random_theta(rng)))
            total += 1
        if total < budget and rng.random() < 0.12:
            externals.append(f"F{i}")
            entries.append(ProbEntry(f"S{i}", (externals[1],), _random_theta(rng)))
            total += 1
        models.append(Model(
            id=f"m{i}",
            external_inputs=tuple(externals),
            internal_inputs=internal,
            outputs=(f"S{i}",),
            table=tuple(entries),
        ))
    if total == 0:
        models[0] = replace(models[0], table=(ProbEntry("S0", ("E0",), 0.5),))
    return MultiModelSystem(tuple(models))


def pick_final(system: MultiModelSystem, seed: int) -> str:
    finals = sorted(final_outputs(system))
    rng = np.random.default_rng(seed + 777)
    return finals[int(rng.integers(0, len(finals)))]


def contradictory_system(seed: int) -> tuple[MultiModelSystem, str]:
    """A system whose compiled facts disagree about one output."""
    rng = np.random.default_rng(seed)
    high = round(float(rng.uniform(0.55, 0.95)), 2)
    low = round(float(rng.uniform(0.05, high - 0.2)), 2)
    models = (
        Model(id="m0", external_inputs=("E0a", "E0b"), outputs=("X",),
              table=(ProbEntry("X", ("E0a",), high),
                     ProbEntry("X", ("E0b",), low))),
        Model(id="m1", external_inputs=("E1",), internal_inputs=("X",), outputs=("Y",),
              table=(ProbEntry("Y", ("X",), round(float(rng.uniform(0.1, 0.9)), 2)),)),
    )
    return MultiModelSystem(models), "Y"
