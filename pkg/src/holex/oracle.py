"""Brute-force verification of the solvers on small instances.

A linear objective over the consistent-distribution polytope attains its
optimum at a vertex, and every vertex is a basic feasible solution: pick
as many worlds as there are independent constraint rows, solve the square
system, and keep the nonnegative solutions.  Enumerating every basis is
exponential, which is why this module carries hard size bounds and exists
only to anchor correctness, never to serve production queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

import numpy as np
import scipy.linalg

from .errors import InfeasibleSystemError, OracleScaleError
from .solver import Distribution
from .system import Atom
from .worlds import ConstraintSystem

MAX_WORLDS = 64
MAX_CONSTRAINTS = 16

_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class VertexSet:
    """All vertices of a constraint polytope, canonically ordered."""

    vertices: tuple[Distribution, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


def _check_scale(cs: ConstraintSystem) -> None:
    if cs.num_worlds > MAX_WORLDS or cs.num_constraints > MAX_CONSTRAINTS:
        raise OracleScaleError(
            f"oracle limits are {MAX_WORLDS} worlds and {MAX_CONSTRAINTS} constraints; "
            f"got {cs.num_worlds} worlds and {cs.num_constraints} constraints")


def _independent_rows(matrix: np.ndarray) -> np.ndarray:
    """Indices of a maximal independent row subset (QR with pivoting)."""
    r, pivots = scipy.linalg.qr(matrix.T, mode="r", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return np.array([], dtype=int)
    rank = int((diag > diag[0] * 1e-12).sum())
    return np.sort(pivots[:rank])


def enumerate_vertices(cs: ConstraintSystem) -> VertexSet:
    """Every basic feasible solution of the constraint system.

    Returns the empty set when no consistent distribution exists, either
    because the equations are inconsistent or because every basic
    solution goes negative.
    """
    _check_scale(cs)
    a, b = cs.matrix, cs.rhs

    rows = _independent_rows(a)
    rank = len(rows)
    augmented_rank = len(_independent_rows(np.column_stack([a, b])))
    if augmented_rank > rank:
        return VertexSet(())  # equations are self-contradictory

    a_r, b_r = a[rows], b[rows]
    n = cs.num_worlds
    n_bases = comb(n, rank)
    if n_bases > 5_000_000:
        raise OracleScaleError(
            f"basis enumeration would visit {n_bases} bases "
            f"({n} worlds choose {rank} independent constraints)")

    accepted: list[np.ndarray] = []
    chunk_size = max(1024, 4_000_000 // (rank * rank))
    basis_iter = combinations(range(n), rank)
    while True:
        block = list(islice(basis_iter, chunk_size))
        if not block:
            break
        bases = np.array(block, dtype=int)
        submats = a_r[:, bases].transpose(1, 0, 2)  # (len(block), rank, rank)

        # Singularity prefilter, scaled by the Hadamard bound so it is
        # insensitive to the magnitude of the coefficients.
        dets = np.linalg.det(submats)
        hadamard = np.linalg.norm(submats, axis=1).prod(axis=1)
        usable = np.abs(dets) > 1e-12 * np.maximum(hadamard, 1e-300)
        if not usable.any():
            continue
        rhs_stack = np.broadcast_to(b_r[:, None], (int(usable.sum()), rank, 1))
        solutions = np.linalg.solve(submats[usable], rhs_stack)[:, :, 0]

        for basis, sol in zip(bases[usable], solutions):
            if sol.min() < -1e-11:
                continue
            x = np.zeros(n)
            x[basis] = sol
            np.clip(x, 0.0, None, out=x)
            x += 0.0  # normalize -0.0
            if np.abs(a @ x - b).max() > _RESIDUAL_TOL:
                continue
            if any(np.abs(x - prev).max() <= _RESIDUAL_TOL for prev in accepted):
                continue
            accepted.append(x)

    accepted.sort(key=lambda x: tuple(x))
    return VertexSet(tuple(Distribution(cs.atoms, x) for x in accepted))


def oracle_extremal(cs: ConstraintSystem, explanandum: Atom, direction: str) -> float:
    """Exact extremal probability of the explanandum, via the vertices."""
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    vertices = enumerate_vertices(cs)
    if not len(vertices):
        raise InfeasibleSystemError((), "no feasible point found by vertex enumeration")
    values = [v.marginal(explanandum) for v in vertices]
    return max(values) if direction == "max" else min(values)


def sample_feasible(cs: ConstraintSystem, count: int, seed: int) -> list[Distribution]:
    """Seeded feasible points as convex combinations of the vertices.

    Convexity of the feasible set makes every combination feasible; the
    result is deterministic per seed.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    vertices = enumerate_vertices(cs)
    if not len(vertices):
        raise InfeasibleSystemError((), "no feasible point found by vertex enumeration")
    if count == 0:
        return []
    stacked = np.stack([v.probs for v in vertices])
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(len(vertices)), size=count)
    return [Distribution(cs.atoms, w @ stacked) for w in weights]
