"""Reconcile probability tables of interconnected prediction models.

Given a DAG of models whose outputs feed other models' inputs, this
package compiles the per-model probability tables into probabilistic
rules, builds the linear consistency constraints over possible worlds,
and selects one joint distribution per query under an optimistic,
pessimistic, or maximum-entropy criterion.
"""

from .errors import (
    AmbiguousProducerError,
    CompileError,
    ConvergenceError,
    HolexError,
    InfeasibleSystemError,
    InputFormatError,
    OracleScaleError,
    PreconditionError,
    ResourceLimitError,
    SystemValidationError,
    UnknownAtomError,
)
from .oracle import VertexSet, enumerate_vertices, oracle_extremal, sample_feasible
from .rules import PRule, RuleBase, compile_system, independent, reachable, reachable_set
from .solver import (
    Criterion,
    Distribution,
    FeasibilityResult,
    HolisticExplanation,
    check_feasible,
    entropy_of,
    explanation_constraints,
    holistic_explanation,
    solve_extremal,
    solve_maxent,
)
from .system import (
    Atom,
    Model,
    MultiModelSystem,
    ProbEntry,
    Violation,
    final_outputs,
    infer_links,
    validate_system,
)
from .worlds import (
    DEFAULT_ATOM_CAP,
    ConstraintSystem,
    World,
    build_constraints,
    cc_set,
    entails,
    world_of,
)
from .cli import load_system

__all__ = [
    "AmbiguousProducerError",
    "Atom",
    "CompileError",
    "ConstraintSystem",
    "ConvergenceError",
    "Criterion",
    "DEFAULT_ATOM_CAP",
    "Distribution",
    "FeasibilityResult",
    "HolexError",
    "HolisticExplanation",
    "InfeasibleSystemError",
    "InputFormatError",
    "Model",
    "MultiModelSystem",
    "OracleScaleError",
    "PRule",
    "PreconditionError",
    "ProbEntry",
    "ResourceLimitError",
    "RuleBase",
    "SystemValidationError",
    "UnknownAtomError",
    "VertexSet",
    "Violation",
    "World",
    "build_constraints",
    "cc_set",
    "check_feasible",
    "compile_system",
    "entails",
    "entropy_of",
    "enumerate_vertices",
    "explanation_constraints",
    "final_outputs",
    "holistic_explanation",
    "independent",
    "infer_links",
    "load_system",
    "oracle_extremal",
    "reachable",
    "reachable_set",
    "sample_feasible",
    "solve_extremal",
    "solve_maxent",
    "validate_system",
    "world_of",
]

__version__ = "0.1.0"
