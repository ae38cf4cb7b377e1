"""Possible worlds over a language and the linear consistency constraints.

A world is one full truth assignment over the language, encoded as a bit
vector: bit ``i`` is the truth value of the ``i``-th atom in the rule
base's atom order.  World ``w``'s index equals its bit pattern, so the
complete conjunction set over ``n`` atoms is simply ``0 .. 2**n - 1`` in
ascending order.

A distribution ``p`` over worlds is consistent with a rule base when

* ``sum(p) == 1``                                  (normalization)
* ``sum(p[w] for w |= head) == theta``             (per fact rule)
* ``theta * sum(p[w] for w |= body)
     == sum(p[w] for w |= head and body)``         (per conditional rule)

Conditional rows are stored in homogeneous form, coefficient
``theta - 1`` on worlds satisfying head-and-body and ``theta`` on worlds
satisfying body-but-not-head with right-hand side 0, which is the same
equation rearranged without division and stays exact for theta in {0, 1}.

Bit patterns never cross the API boundary of reports: callers label
worlds with explicit atom assignments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ResourceLimitError, UnknownAtomError
from .rules import PRule, RuleBase

DEFAULT_ATOM_CAP = 24

NORMALIZATION = "normalization"


@dataclass(frozen=True)
class World:
    """One truth assignment, bit ``i`` = truth of the ``i``-th atom."""

    bits: int
    width: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError(f"bits {self.bits} out of range for width {self.width}")

    def truth(self, i: int) -> bool:
        return bool((self.bits >> i) & 1)

    def assignment(self, atoms: Sequence[str]) -> dict[str, bool]:
        if len(atoms) != self.width:
            raise ValueError(f"expected {self.width} atoms, got {len(atoms)}")
        return {a: self.truth(i) for i, a in enumerate(atoms)}


def _check_cap(n: int, atom_cap: int) -> None:
    if n <= 0:
        raise ValueError("language must contain at least one atom")
    if n > atom_cap:
        raise ResourceLimitError(
            f"language has {n} atoms, above the cap of {atom_cap} "
            f"(2**{n} worlds); prune to the explanandum's reachable set "
            f"or raise the cap explicitly")


def cc_set(atoms: Sequence[str], *, atom_cap: int = DEFAULT_ATOM_CAP) -> list[World]:
    """All ``2**n`` worlds over ``atoms``, in ascending bit order."""
    n = len(atoms)
    _check_cap(n, atom_cap)
    return [World(bits, n) for bits in range(1 << n)]


def _atom_indices(conj: Iterable[str], atoms: Sequence[str]) -> list[int]:
    index = {a: i for i, a in enumerate(atoms)}
    out = []
    for a in conj:
        if a not in index:
            raise UnknownAtomError(a, tuple(atoms))
        out.append(index[a])
    return out


def entails(world: World, conj: Iterable[str], atoms: Sequence[str]) -> bool:
    """True iff every atom of the conjunction is true in the world.

    The empty conjunction is entailed by every world.
    """
    return all(world.truth(i) for i in _atom_indices(conj, atoms))


def world_of(assignment: Mapping[str, bool], atoms: Sequence[str]) -> World:
    """Build the world matching a full atom-to-truth assignment."""
    if set(assignment) != set(atoms):
        raise ValueError("assignment must cover exactly the language atoms")
    bits = 0
    for i, a in enumerate(atoms):
        if assignment[a]:
            bits |= 1 << i
    return World(bits, len(atoms))


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """The linear equality system over world probabilities.

    ``matrix`` has one row per constraint and one column per world;
    ``origins`` parallels the rows and holds the originating rule, or the
    ``NORMALIZATION`` marker for the single all-ones row.
    """

    atoms: tuple[str, ...]
    matrix: np.ndarray
    rhs: np.ndarray
    origins: tuple[PRule | str, ...]

    def __post_init__(self):
        self.matrix.flags.writeable = False
        self.rhs.flags.writeable = False

    @property
    def num_worlds(self) -> int:
        return self.matrix.shape[1]

    @property
    def num_constraints(self) -> int:
        return self.matrix.shape[0]

    def entailing_mask(self, conj: Iterable[str]) -> np.ndarray:
        """Boolean mask over world indices entailing the conjunction."""
        idx = np.arange(self.num_worlds, dtype=np.int64)
        mask = np.ones(self.num_worlds, dtype=bool)
        for i in _atom_indices(conj, self.atoms):
            mask &= ((idx >> i) & 1).astype(bool)
        return mask

    def residuals(self, probs: np.ndarray) -> np.ndarray:
        """Absolute residual of each stored row at ``probs``."""
        return np.abs(self.matrix @ np.asarray(probs, dtype=float) - self.rhs)

    def residuals_direct(self, probs: np.ndarray) -> np.ndarray:
        """Residuals of the defining equations, recomputed from masks.

        Uses the non-rearranged forms (fact: sum over head worlds minus
        theta; conditional: theta times body mass minus head-and-body
        mass), independent of how the rows are stored.
        """
        p = np.asarray(probs, dtype=float)
        out = np.empty(self.num_constraints)
        for i, origin in enumerate(self.origins):
            if origin == NORMALIZATION:
                out[i] = abs(p.sum() - 1.0)
            elif origin.is_fact:
                out[i] = abs(p[self.entailing_mask([origin.head])].sum() - origin.theta)
            else:
                body = p[self.entailing_mask(origin.body)].sum()
                both = p[self.entailing_mask((origin.head, *origin.body))].sum()
                out[i] = abs(origin.theta * body - both)
        return out


def build_constraints(rb: RuleBase, *, atom_cap: int = DEFAULT_ATOM_CAP) -> ConstraintSystem:
    """Assemble the consistency constraints for a rule base.

    Emits one row per rule plus the normalization row, so the constraint
    count is ``len(rb.rules) + 1`` and the variable count ``2**n``.
    """
    atoms = rb.language
    n = len(atoms)
    _check_cap(n, atom_cap)
    num_worlds = 1 << n
    idx = np.arange(num_worlds, dtype=np.int64)
    truth = [(idx >> i & 1).astype(bool) for i in range(n)]
    index = rb.index

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    origins: list[PRule | str] = []

    for rule in rb.rules:
        head = truth[index[rule.head]]
        row = np.zeros(num_worlds)
        if rule.is_fact:
            row[head] = 1.0
            rows.append(row)
            rhs.append(rule.theta)
        else:
            body = np.ones(num_worlds, dtype=bool)
            for atom in rule.body:
                body &= truth[index[atom]]
            row[body & head] = rule.theta - 1.0
            row[body & ~head] = rule.theta
            rows.append(row)
            rhs.append(0.0)
        origins.append(rule)

    rows.append(np.ones(num_worlds))
    rhs.append(1.0)
    origins.append(NORMALIZATION)

    return ConstraintSystem(
        atoms=atoms,
        matrix=np.array(rows),
        rhs=np.array(rhs),
        origins=tuple(origins),
    )
