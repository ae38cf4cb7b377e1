"""Exception types shared across the package.

Validation of user-supplied systems is reported as data (see
``holex.system.validate_system``); exceptions are reserved for contract
violations, malformed input files, infeasibility, and resource limits.
"""

from __future__ import annotations


class HolexError(Exception):
    """Base class for all errors raised by this package."""


class UnknownAtomError(HolexError):
    """An atom name was looked up in a language that does not contain it."""

    def __init__(self, atom: str, language: tuple[str, ...]):
        self.atom = atom
        self.language = tuple(language)
        super().__init__(
            f"unknown atom {atom!r}; language is {', '.join(language) or '(empty)'}"
        )


class AmbiguousProducerError(HolexError):
    """An internal input is produced by zero or more than one model."""

    def __init__(self, atom: str, producers: tuple[str, ...]):
        self.atom = atom
        self.producers = tuple(producers)
        if producers:
            detail = f"produced by models {', '.join(producers)}"
        else:
            detail = "produced by no model"
        super().__init__(f"internal input {atom!r} is {detail}")


class SystemValidationError(HolexError):
    """A system failed validation; carries the full violation report."""

    def __init__(self, report):
        self.report = tuple(report)
        lines = "; ".join(v.message for v in self.report)
        super().__init__(f"invalid system: {lines}")


class InputFormatError(HolexError):
    """A system description file is malformed (syntax or schema)."""


class PreconditionError(HolexError):
    """An operation was called outside its stated precondition."""


class CompileError(HolexError):
    """A system cannot be translated into rules."""


class ResourceLimitError(HolexError):
    """A configured size limit would be exceeded."""


class OracleScaleError(ResourceLimitError):
    """An oracle routine was asked to run beyond its hard size bounds."""


class InfeasibleSystemError(HolexError):
    """No consistent joint distribution satisfies the rules.

    ``core`` holds the originating rules of a (best effort) irreducible
    conflicting subset, so users can locate the models that disagree.
    """

    def __init__(self, core=(), message: str | None = None):
        self.core = tuple(core)
        if message is None:
            if self.core:
                rules = "; ".join(str(r) for r in self.core)
                message = f"no consistent distribution exists; conflicting rules: {rules}"
            else:
                message = "no consistent distribution exists"
        super().__init__(message)


class ConvergenceError(HolexError):
    """An iterative solver stopped before meeting its residual contract."""

    def __init__(self, message: str, *, constraint_residual: float, stationarity_residual: float):
        self.constraint_residual = constraint_residual
        self.stationarity_residual = stationarity_residual
        super().__init__(
            f"{message} (constraint residual {constraint_residual:.3e}, "
            f"stationarity residual {stationarity_residual:.3e})"
        )
