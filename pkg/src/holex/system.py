"""Multi-model systems: models, probability tables, and the link graph.

A system is a set of prediction models wired into a DAG: one model's
outputs may serve as another model's internal inputs.  External inputs
come from outside the system (an image, a test score) and are treated as
known facts.  Each model carries a probability table mapping input
conditions to output probabilities; those entries are the raw material
compiled into rules by :mod:`holex.rules`.

Atom names share one namespace per system: the same name always denotes
the same sentence, which is what ties a producer's output to a consumer's
internal input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import AmbiguousProducerError

Atom = str


def _check_atom(name: object, where: str) -> str:
    if not isinstance(name, str) or not name:
        raise ValueError(f"{where}: atom name must be a nonempty string, got {name!r}")
    if any(ch.isspace() for ch in name):
        raise ValueError(f"{where}: atom name {name!r} must not contain whitespace")
    return name


def _unique_atoms(atoms: Iterable[Atom], where: str) -> tuple[Atom, ...]:
    out: list[Atom] = []
    for a in atoms:
        _check_atom(a, where)
        if a in out:
            raise ValueError(f"{where}: duplicate atom {a!r}")
        out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class ProbEntry:
    """One probability-table row: Pr(output | given) = theta.

    ``given`` may be empty (an unconditional output probability).
    """

    output: Atom
    given: tuple[Atom, ...]
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "given", _unique_atoms(self.given, "prob entry"))
        _check_atom(self.output, "prob entry")
        theta = float(self.theta)
        if not 0.0 <= theta <= 1.0:
            raise ValueError(f"prob entry for {self.output!r}: theta {theta} outside [0, 1]")
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True)
class Model:
    """A prediction model: inputs, outputs, and its probability table.

    ``external_inputs`` are conditions supplied from outside the system;
    ``internal_inputs`` must be produced by other models.  Collections are
    stored in declaration order, which later fixes the compiled language
    order (and with it the world bit-encoding), so equal inputs always
    reproduce identical results.
    """

    id: str
    external_inputs: tuple[Atom, ...] = ()
    internal_inputs: tuple[Atom, ...] = ()
    outputs: tuple[Atom, ...] = ()
    table: tuple[ProbEntry, ...] = ()

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValueError(f"model id must be a nonempty string, got {self.id!r}")
        object.__setattr__(
            self, "external_inputs",
            _unique_atoms(self.external_inputs, f"model {self.id!r} external_inputs"))
        object.__setattr__(
            self, "internal_inputs",
            _unique_atoms(self.internal_inputs, f"model {self.id!r} internal_inputs"))
        object.__setattr__(
            self, "outputs", _unique_atoms(self.outputs, f"model {self.id!r} outputs"))
        object.__setattr__(self, "table", tuple(self.table))

    @property
    def inputs(self) -> tuple[Atom, ...]:
        return self.external_inputs + self.internal_inputs


@dataclass(frozen=True)
class MultiModelSystem:
    """A set of models plus (optionally) an explicit link graph.

    Links are redundant given input/output atom matching, so they may be
    omitted; when present they are cross-checked against the inferred set
    during validation.
    """

    models: tuple[Model, ...]
    links: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        models = tuple(self.models)
        seen: set[str] = set()
        for m in models:
            if m.id in seen:
                raise ValueError(f"duplicate model id {m.id!r}")
            seen.add(m.id)
        object.__setattr__(self, "models", models)
        if self.links is not None:
            object.__setattr__(
                self, "links", tuple((str(a), str(b)) for a, b in self.links))

    def model(self, model_id: str) -> Model:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(model_id)


@dataclass(frozen=True)
class Violation:
    """One violated system invariant; ``subject`` names the offender."""

    code: str
    subject: str
    message: str


ValidationReport = list[Violation]


def _producer_map(models: Iterable[Model]) -> dict[Atom, list[str]]:
    producers: dict[Atom, list[str]] = {}
    for m in models:
        for atom in m.outputs:
            producers.setdefault(atom, []).append(m.id)
    return producers


def _matching_links(models: tuple[Model, ...]) -> set[tuple[str, str]]:
    """Link pairs implied by output/internal-input atom matching."""
    pairs: set[tuple[str, str]] = set()
    for producer in models:
        out = set(producer.outputs)
        for consumer in models:
            if consumer.id != producer.id and out & set(consumer.internal_inputs):
                pairs.add((producer.id, consumer.id))
    return pairs


def infer_links(models: Iterable[Model]) -> frozenset[tuple[str, str]]:
    """Derive the link graph from atom matching.

    Raises :class:`AmbiguousProducerError` if any internal input is
    produced by zero or several models, since the graph is ill-defined
    then.
    """
    models = tuple(models)
    producers = _producer_map(models)
    for m in models:
        for atom in m.internal_inputs:
            who = tuple(p for p in producers.get(atom, []) if p != m.id)
            if len(who) != 1:
                raise AmbiguousProducerError(atom, who)
    return frozenset(_matching_links(models))


def _find_cycle(nodes: list[str], edges: set[tuple[str, str]]) -> list[str] | None:
    """Return one directed cycle as a node list, or None."""
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        if a in succ and b in succ:
            succ[a].append(b)
    color: dict[str, int] = {n: 0 for n in nodes}  # 0 new, 1 active, 2 done
    stack: list[str] = []

    def visit(n: str) -> list[str] | None:
        color[n] = 1
        stack.append(n)
        for nxt in succ[n]:
            if color[nxt] == 1:
                return stack[stack.index(nxt):] + [nxt]
            if color[nxt] == 0:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        color[n] = 2
        return None

    for n in nodes:
        if color[n] == 0:
            found = visit(n)
            if found:
                return found
    return None


def validate_system(system: MultiModelSystem) -> ValidationReport:
    """Check every system invariant; a valid system yields an empty report.

    Violations are returned as data rather than raised, so callers can
    show all problems at once.  The checks are deterministic and
    side-effect free.
    """
    report: ValidationReport = []
    models = system.models
    if not models:
        report.append(Violation("empty-system", "-", "system contains no models"))
        return report

    for m in models:
        overlap = set(m.external_inputs) & set(m.internal_inputs)
        for atom in sorted(overlap):
            report.append(Violation(
                "input-overlap", m.id,
                f"model {m.id!r}: atom {atom!r} is both an external and an internal input"))
        clash = set(m.outputs) & set(m.inputs)
        for atom in sorted(clash):
            report.append(Violation(
                "output-input-overlap", m.id,
                f"model {m.id!r}: atom {atom!r} is both an output and an input"))
        seen_pairs: set[tuple[Atom, frozenset[Atom]]] = set()
        for entry in m.table:
            if entry.output not in m.outputs:
                report.append(Violation(
                    "entry-output-unknown", m.id,
                    f"model {m.id!r}: table entry for {entry.output!r}, "
                    f"which is not one of its outputs"))
            for atom in entry.given:
                if atom not in m.inputs:
                    report.append(Violation(
                        "entry-given-unknown", m.id,
                        f"model {m.id!r}: entry Pr({entry.output}|...) conditions on "
                        f"{atom!r}, which is not one of its inputs"))
            key = (entry.output, frozenset(entry.given))
            if key in seen_pairs:
                report.append(Violation(
                    "duplicate-entry", m.id,
                    f"model {m.id!r}: duplicate table entry for output {entry.output!r} "
                    f"given {sorted(entry.given)}"))
            seen_pairs.add(key)

    producers = _producer_map(models)
    for m in models:
        for atom in m.internal_inputs:
            who = [p for p in producers.get(atom, []) if p != m.id]
            if not who:
                report.append(Violation(
                    "unproduced-internal-input", m.id,
                    f"model {m.id!r}: internal input {atom!r} is produced by no model"))
            elif len(who) > 1:
                report.append(Violation(
                    "ambiguous-producer", atom,
                    f"internal input {atom!r} of model {m.id!r} is produced by "
                    f"several models: {', '.join(sorted(who))}"))

    inferred = _matching_links(models)
    ids = [m.id for m in models]

    if system.links is not None:
        explicit = set(system.links)
        for a, b in sorted(explicit):
            if a not in ids or b not in ids:
                report.append(Violation(
                    "unknown-model-in-link", f"({a},{b})",
                    f"link ({a!r}, {b!r}) references an unknown model id"))
            elif a == b:
                report.append(Violation(
                    "self-link", f"({a},{b})", f"link ({a!r}, {b!r}) is a self-loop"))
        for pair in sorted(explicit - inferred):
            if pair[0] in ids and pair[1] in ids and pair[0] != pair[1]:
                report.append(Violation(
                    "link-mismatch", f"({pair[0]},{pair[1]})",
                    f"explicit link ({pair[0]!r}, {pair[1]!r}) is not justified: no output "
                    f"of {pair[0]!r} is an internal input of {pair[1]!r}"))
        for pair in sorted(inferred - explicit):
            report.append(Violation(
                "link-mismatch", f"({pair[0]},{pair[1]})",
                f"inferred link ({pair[0]!r}, {pair[1]!r}) is missing from the explicit "
                f"link list"))

    cycle = _find_cycle(ids, inferred)
    if cycle:
        report.append(Violation(
            "cycle", " -> ".join(cycle),
            f"the model graph contains a cycle: {' -> '.join(cycle)}"))
    else:
        sources = {a for a, _ in inferred}
        if all(m.id in sources for m in models):
            report.append(Violation(
                "no-sink", "-",
                "every model has an outgoing link, so the system has no final outputs"))

    return report


def final_outputs(system: MultiModelSystem) -> frozenset[Atom]:
    """Outputs of models with no outgoing link; the legal explananda.

    Raises :class:`SystemValidationError` if the system is invalid.
    """
    from .errors import SystemValidationError

    report = validate_system(system)
    if report:
        raise SystemValidationError(report)
    links = infer_links(system.models)
    sources = {a for a, _ in links}
    atoms: set[Atom] = set()
    for m in system.models:
        if m.id not in sources:
            atoms.update(m.outputs)
    return frozenset(atoms)
