"""Select a holistic explanation from the consistent-distribution polytope.

The consistency constraints usually leave many joint distributions; the
three criteria pick one:

* optimistic  - maximize the explanandum's probability (linear program)
* pessimistic - minimize it (linear program)
* laplace     - maximize entropy (unique by strict concavity)

Linear programs run on HiGHS through scipy, which is deterministic for
identical inputs.  The entropy maximizer first identifies worlds forced
to probability zero (the entropy gradient diverges at zero, so every
world that can carry mass does at the optimum), then runs a damped
Newton iteration on the dual over the remaining worlds, where the
solution has the exponential form ``p = exp(A^T lam - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal, Mapping

import numpy as np
from scipy.optimize import linprog

from .errors import (
    ConvergenceError,
    InfeasibleSystemError,
    PreconditionError,
    SystemValidationError,
)
from .rules import PRule, compile_system, reachable_set
from .system import Atom, MultiModelSystem, final_outputs, validate_system
from .worlds import DEFAULT_ATOM_CAP, NORMALIZATION, ConstraintSystem, build_constraints


class Criterion(str, Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"
    LAPLACE = "laplace"


Direction = Literal["max", "min"]


def entropy_of(probs: np.ndarray) -> float:
    """Shannon entropy in nats, with 0 * ln 0 taken as 0."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0.0]
    return float(-(p * np.log(p)).sum())


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability assignment over the worlds of an atom order."""

    atoms: tuple[Atom, ...]
    probs: np.ndarray

    _TOL = 1e-9

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (1 << len(self.atoms),):
            raise ValueError(
                f"expected {1 << len(self.atoms)} world probabilities, got {probs.shape}")
        if probs.min() < -self._TOL or probs.max() > 1.0 + self._TOL:
            raise ValueError("world probabilities outside [0, 1]")
        if abs(probs.sum() - 1.0) > self._TOL:
            raise ValueError(f"world probabilities sum to {probs.sum()!r}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def _mask(self, conj) -> np.ndarray:
        idx = np.arange(len(self.probs), dtype=np.int64)
        mask = np.ones(len(self.probs), dtype=bool)
        index = {a: i for i, a in enumerate(self.atoms)}
        for a in conj:
            if a not in index:
                from .errors import UnknownAtomError

                raise UnknownAtomError(a, self.atoms)
            mask &= ((idx >> index[a]) & 1).astype(bool)
        return mask

    def probability(self, conj) -> float:
        """Probability of a conjunction of atoms."""
        return float(self.probs[self._mask(conj)].sum())

    def marginal(self, atom: Atom) -> float:
        return self.probability([atom])

    def marginals(self) -> dict[Atom, float]:
        return {a: self.marginal(a) for a in self.atoms}

    def prob_of(self, assignment: Mapping[Atom, bool]) -> float:
        """Probability of one fully specified world."""
        if set(assignment) != set(self.atoms):
            raise ValueError("assignment must cover exactly the distribution's atoms")
        bits = 0
        for i, a in enumerate(self.atoms):
            if assignment[a]:
                bits |= 1 << i
        return float(self.probs[bits])

    def entropy(self) -> float:
        return entropy_of(self.probs)


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    """Outcome of a feasibility check; truthy iff feasible.

    On success ``witness`` is one consistent distribution; on failure
    ``core`` holds rules forming a (best effort) irreducible conflict.
    """

    feasible: bool
    witness: Distribution | None = None
    core: tuple[PRule, ...] = ()

    def __bool__(self) -> bool:
        return self.feasible


@dataclass(frozen=True, eq=False)
class HolisticExplanation:
    """A consistent distribution selected by a criterion, plus summaries."""

    explanandum: Atom
    criterion: Criterion
    distribution: Distribution
    objective: float
    entropy: float
    marginals: dict[Atom, float]
    pruned_language: tuple[Atom, ...]


def _run_lp(cs: ConstraintSystem, c: np.ndarray, rows: np.ndarray | None = None):
    matrix, rhs = cs.matrix, cs.rhs
    if rows is not None:
        matrix, rhs = matrix[rows], rhs[rows]
    return linprog(c, A_eq=matrix, b_eq=rhs, bounds=(0.0, 1.0), method="highs")


def _feasible_point(cs: ConstraintSystem, rows: np.ndarray | None = None):
    res = _run_lp(cs, np.zeros(cs.num_worlds), rows)
    if res.status == 0:
        return res.x
    if res.status == 2:
        return None
    raise RuntimeError(f"linear solver failed unexpectedly: {res.message}")


def _infeasible_core(cs: ConstraintSystem) -> tuple[PRule, ...]:
    """Deletion filter: drop rules whose removal keeps the conflict."""
    norm = [i for i, o in enumerate(cs.origins) if o == NORMALIZATION]
    kept = [i for i, o in enumerate(cs.origins) if o != NORMALIZATION]
    for i in list(kept):
        trial = [j for j in kept if j != i]
        if _feasible_point(cs, np.array(trial + norm, dtype=int)) is None:
            kept = trial
    return tuple(cs.origins[i] for i in kept)


def _clip(x: np.ndarray) -> np.ndarray:
    return np.clip(x, 0.0, 1.0) + 0.0  # + 0.0 turns -0.0 into 0.0


def check_feasible(cs: ConstraintSystem) -> FeasibilityResult:
    """Decide whether any consistent distribution exists.

    Returns a witness distribution when feasible; otherwise the
    originating rules of an irreducible infeasible subset.
    """
    point = _feasible_point(cs)
    if point is not None:
        return FeasibilityResult(True, witness=Distribution(cs.atoms, _clip(point)))
    return FeasibilityResult(False, core=_infeasible_core(cs))


def solve_extremal(
    cs: ConstraintSystem, explanandum: Atom, direction: Direction
) -> tuple[float, Distribution]:
    """Extremal probability of the explanandum over all consistent worlds.

    Returns the optimal value and one distribution achieving it.  The
    value is the contract; when the optimal face is not a single point
    the returned vertex is whichever the deterministic solver lands on.
    """
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    support = cs.entailing_mask([explanandum]).astype(float)
    sign = -1.0 if direction == "max" else 1.0
    res = _run_lp(cs, sign * support)
    if res.status == 2:
        raise InfeasibleSystemError(_infeasible_core(cs))
    if res.status == 3:
        raise RuntimeError("objective unbounded on a probability polytope (internal fault)")
    if res.status != 0:
        raise RuntimeError(f"linear solver failed unexpectedly: {res.message}")
    dist = Distribution(cs.atoms, _clip(res.x))
    return float(support @ dist.probs), dist


def _implied_zero_mask(cs: ConstraintSystem) -> np.ndarray:
    """Worlds forced to zero directly by theta in {0, 1} rules."""
    zero = np.zeros(cs.num_worlds, dtype=bool)
    for origin in cs.origins:
        if origin == NORMALIZATION:
            continue
        if origin.theta == 0.0:
            zero |= cs.entailing_mask((origin.head, *origin.body))
        elif origin.theta == 1.0:
            if origin.is_fact:
                zero |= ~cs.entailing_mask([origin.head])
            else:
                zero |= cs.entailing_mask(origin.body) & ~cs.entailing_mask(
                    (origin.head, *origin.body))
    return zero


def _positive_support(cs: ConstraintSystem, witness: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Mask of worlds that carry positive mass in some consistent point.

    Directly implied zeros are masked first; each undecided world is then
    settled by maximizing its own probability.  Any world seen positive
    along the way is accepted without its own solve.
    """
    zero = _implied_zero_mask(cs)
    positive = witness > tol
    for w in range(cs.num_worlds):
        if zero[w] or positive[w]:
            continue
        c = np.zeros(cs.num_worlds)
        c[w] = -1.0
        res = _run_lp(cs, c)
        if res.status != 0:
            raise RuntimeError(f"support probe failed unexpectedly: {res.message}")
        positive |= res.x > tol
        if res.x[w] <= tol:
            zero[w] = True
    return ~zero


def solve_maxent(
    cs: ConstraintSystem,
    *,
    constraint_tol: float = 1e-8,
    stationarity_tol: float = 1e-6,
    max_iter: int = 120,
) -> Distribution:
    """The unique entropy-maximizing consistent distribution.

    Newton steps on the dual with backtracking line search; redundant
    constraint rows are handled by a least-squares Newton system.  Raises
    :class:`InfeasibleSystemError` when no consistent distribution
    exists and :class:`ConvergenceError` if the residual contract cannot
    be met within the iteration budget.
    """
    feasible = check_feasible(cs)
    if not feasible:
        raise InfeasibleSystemError(feasible.core)

    support = _positive_support(cs, feasible.witness.probs)
    a_sup = cs.matrix[:, support]
    b = cs.rhs
    m = cs.num_constraints

    lam = np.zeros(m)

    def point(l: np.ndarray) -> np.ndarray:
        return np.exp(np.minimum(a_sup.T @ l - 1.0, 500.0))

    def dual(l: np.ndarray) -> float:
        return float(point(l).sum() - l @ b)

    p = point(lam)
    value = dual(lam)
    for _ in range(max_iter):
        grad = a_sup @ p - b
        if np.abs(grad).max() <= min(constraint_tol, 1e-10):
            break
        hess = (a_sup * p) @ a_sup.T
        step = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        slope = float(grad @ step)
        if slope > 0.0:  # numerically non-descent, fall back to gradient
            step = -grad
            slope = float(grad @ step)
        t = 1.0
        for _ in range(60):
            trial = lam + t * step
            trial_value = dual(trial)
            if trial_value <= value + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break  # line search stalled; report residuals below
        lam = lam + t * step
        p = point(lam)
        value = trial_value

    probs = np.zeros(cs.num_worlds)
    probs[support] = p
    residual = float(np.abs(cs.matrix @ probs - b).max())
    stationarity = float(np.abs(a_sup.T @ lam - 1.0 - np.log(p)).max()) if p.size else 0.0
    if residual > constraint_tol or stationarity > stationarity_tol:
        raise ConvergenceError(
            "entropy maximization did not converge",
            constraint_residual=residual,
            stationarity_residual=stationarity)
    probs /= probs.sum()
    return Distribution(cs.atoms, probs)


def explanation_constraints(
    system: MultiModelSystem,
    explanandum: Atom,
    *,
    prune: bool = True,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> ConstraintSystem:
    """Validate, compile, optionally prune, and build the constraints.

    The explanandum must be a final output: explanations are defined for
    sentences nothing downstream consumes.
    """
    report = validate_system(system)
    if report:
        raise SystemValidationError(report)
    finals = final_outputs(system)
    if explanandum not in finals:
        raise PreconditionError(
            f"explanandum {explanandum!r} is not a final output of the system "
            f"(final outputs: {', '.join(sorted(finals))}); only final outputs "
            f"can be explained")
    rb = compile_system(system)
    if prune:
        rb = reachable_set(explanandum, rb)
    return build_constraints(rb, atom_cap=atom_cap)


def holistic_explanation(
    system: MultiModelSystem,
    explanandum: Atom,
    criterion: Criterion,
    *,
    prune: bool = True,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> HolisticExplanation:
    """Reconcile the system's tables into one distribution for a target.

    Pipeline: validate, compile to rules, prune to the explanandum's
    reachable set, build constraints, then solve under the criterion.
    """
    criterion = Criterion(criterion)
    cs = explanation_constraints(system, explanandum, prune=prune, atom_cap=atom_cap)
    if criterion is Criterion.LAPLACE:
        dist = solve_maxent(cs)
        objective = dist.marginal(explanandum)
    else:
        direction: Direction = "max" if criterion is Criterion.OPTIMISTIC else "min"
        objective, dist = solve_extremal(cs, explanandum, direction)
    return HolisticExplanation(
        explanandum=explanandum,
        criterion=criterion,
        distribution=dist,
        objective=objective,
        entropy=dist.entropy(),
        marginals=dist.marginals(),
        pruned_language=cs.atoms,
    )
