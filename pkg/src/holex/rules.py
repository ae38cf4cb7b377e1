"""Compile a multi-model system into probabilistic rules, plus reachability.

Each probability-table entry becomes exactly one rule.  Entries
conditioned on external inputs compile to facts (external inputs are
known, so the probability is unconditional within the system); entries
conditioned on internal inputs compile to conditional rules.  For mixed
conditions the external atoms are dropped from the body and the
probability is passed through unchanged.

Reachability over the rule graph (body atom -> head) defines which
sentences can influence which others; pruning a rule base to the
sentences from which a target is reachable is what keeps world
enumeration tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import CompileError, UnknownAtomError
from .system import Atom, MultiModelSystem, _check_atom


@dataclass(frozen=True)
class PRule:
    """A probabilistic rule: Pr(head | body conjunction) = theta.

    An empty body makes it a fact rule, asserting Pr(head) = theta.
    """

    head: Atom
    body: tuple[Atom, ...]
    theta: float

    def __post_init__(self):
        _check_atom(self.head, "rule")
        body = tuple(self.body)
        if len(set(body)) != len(body):
            raise ValueError(f"rule for {self.head!r}: body atoms must be distinct")
        if self.head in body:
            raise ValueError(f"rule for {self.head!r}: head may not occur in its own body")
        object.__setattr__(self, "body", body)
        theta = float(self.theta)
        if not 0.0 <= theta <= 1.0:
            raise ValueError(f"rule for {self.head!r}: theta {theta} outside [0, 1]")
        object.__setattr__(self, "theta", theta)

    @property
    def is_fact(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        body = ", ".join(self.body)
        return f"{self.head} <- {body}{' ' if body else ''}: [{self.theta:g}]"


@dataclass(frozen=True)
class RuleBase:
    """An ordered language and the rules over it.

    The language order is the canonical atom order used for world
    bit-encodings, so it must be deterministic for reproducible results.
    """

    language: tuple[Atom, ...]
    rules: tuple[PRule, ...]

    def __post_init__(self):
        language = tuple(self.language)
        if len(set(language)) != len(language):
            raise ValueError("rule base language contains duplicate atoms")
        object.__setattr__(self, "language", language)
        object.__setattr__(self, "rules", tuple(self.rules))
        known = set(language)
        for rule in self.rules:
            for atom in (rule.head, *rule.body):
                if atom not in known:
                    raise ValueError(f"rule {rule} uses atom {atom!r} outside the language")

    @cached_property
    def index(self) -> dict[Atom, int]:
        return {a: i for i, a in enumerate(self.language)}

    @cached_property
    def rules_by_head(self) -> dict[Atom, tuple[PRule, ...]]:
        grouped: dict[Atom, list[PRule]] = {}
        for rule in self.rules:
            grouped.setdefault(rule.head, []).append(rule)
        return {h: tuple(rs) for h, rs in grouped.items()}

    def require(self, atom: Atom) -> None:
        if atom not in self.index:
            raise UnknownAtomError(atom, self.language)


def compile_system(system: MultiModelSystem) -> RuleBase:
    """Translate a validated system into its language and rule base.

    The language is the set of all model outputs, ordered by model id and
    then declaration order.  Exactly one rule is emitted per table entry.
    Duplicate rules (same head and body, different theta) are kept; a
    conflict between them surfaces as solver infeasibility rather than a
    silent choice here.
    """
    models = sorted(system.models, key=lambda m: m.id)

    language: list[Atom] = []
    for m in models:
        for atom in m.outputs:
            if atom not in language:
                language.append(atom)

    externals: set[Atom] = set()
    for m in models:
        externals.update(m.external_inputs)

    rules: list[PRule] = []
    for m in models:
        ext = set(m.external_inputs)
        internal = set(m.internal_inputs)
        for entry in m.table:
            if entry.output in externals:
                raise CompileError(
                    f"model {m.id!r} asserts a probability for {entry.output!r}, which is "
                    f"an external input; external inputs are facts from outside the system")
            unknown = [a for a in entry.given if a not in ext and a not in internal]
            if unknown:
                raise CompileError(
                    f"model {m.id!r}: entry Pr({entry.output}|...) conditions on "
                    f"{unknown[0]!r}, which is not one of its inputs")
            body = tuple(a for a in entry.given if a in internal)
            rules.append(PRule(entry.output, body, entry.theta))

    return RuleBase(tuple(language), tuple(rules))


def _ancestors(atom: Atom, rb: RuleBase) -> set[Atom]:
    """All atoms from which ``atom`` is reachable via rule bodies."""
    seen: set[Atom] = set()
    stack = [atom]
    while stack:
        current = stack.pop()
        for rule in rb.rules_by_head.get(current, ()):
            for b in rule.body:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
    return seen


def reachable(target: Atom, source: Atom, rb: RuleBase) -> bool:
    """True iff ``target`` is reachable from ``source``.

    Direct case: some rule has head ``target`` with ``source`` in its
    body; otherwise a chain of such steps.  Irreflexive on acyclic rule
    graphs.
    """
    rb.require(target)
    rb.require(source)
    return source in _ancestors(target, rb)


def independent(a: Atom, b: Atom, rb: RuleBase) -> bool:
    """True iff neither atom is reachable from the other."""
    return not reachable(a, b, rb) and not reachable(b, a, rb)


def reachable_set(explanandum: Atom, rb: RuleBase) -> RuleBase:
    """Prune ``rb`` to the explanandum and everything that can reach it.

    The pruned language keeps the original atom order; the pruned rules
    are exactly those whose head lies in the pruned language (their
    bodies are then automatically inside it too).
    """
    rb.require(explanandum)
    keep = _ancestors(explanandum, rb)
    keep.add(explanandum)
    language = tuple(a for a in rb.language if a in keep)
    rules = tuple(r for r in rb.rules if r.head in keep)
    return RuleBase(language, rules)
