"""Independent brute-force verifiers.

Exhaustive best-fixed-labeling search, labeling payoff evaluation,
finite-difference derivative oracles, and a generic convex-QP projection
oracle.  Nothing here shares code with the implementations it checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .environments import PayoffFunction
from .polytope import ProblemDims

OPT_GUARD = 10 ** 6


@dataclass(frozen=True)
class OptResult:
    opt_value: float
    argmax_labeling: tuple[int, ...]
    ties: int


def labeling_payoff(seq: Sequence[PayoffFunction],
                    labels: Sequence[int]) -> float:
    """Total payoff of a fixed labeling over a payoff sequence."""
    total = 0.0
    for pf in seq:
        i, j = pf.pair
        L = pf.block.shape[0]
        a, b = labels[i], labels[j]
        if not (0 <= a < L and 0 <= b < L):
            raise ValueError(f"label out of range for pair ({i}, {j})")
        total += float(pf.block[a, b])
    return total


def brute_force_opt(seq: Sequence[PayoffFunction],
                    dims: ProblemDims) -> OptResult:
    """Exhaustive OPT over all L^n labelings; lexicographic tie-break."""
    n, L = dims.n_items, dims.n_labels
    if L ** n > OPT_GUARD:
        raise ValueError(
            f"{L}^{n} labelings exceed the {OPT_GUARD} guard; "
            "use a sampled bound instead")
    best = -np.inf
    best_labels: tuple[int, ...] | None = None
    ties = 0
    for labels in itertools.product(range(L), repeat=n):
        value = labeling_payoff(seq, labels)
        if value > best + 1e-12:
            best, best_labels, ties = value, labels, 1
        elif value >= best - 1e-12:
            ties += 1
    if best_labels is None:
        best, best_labels, ties = 0.0, tuple([0] * n), L ** n
    return OptResult(float(best), best_labels, ties)


def fd_gradient(f: Callable[[np.ndarray], float], M: np.ndarray,
                step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient per matrix coordinate, symmetrized."""
    M = np.asarray(M, dtype=float)
    G = np.zeros_like(M)
    for w in range(M.shape[0]):
        for x in range(M.shape[1]):
            E = np.zeros_like(M)
            E[w, x] = step
            hi, lo = f(M + E), f(M - E)
            if not (np.isfinite(hi) and np.isfinite(lo)):
                raise ValueError(f"non-finite evaluation at coordinate "
                                 f"({w}, {x})")
            G[w, x] = (hi - lo) / (2.0 * step)
    return 0.5 * (G + G.T)


def fd_hessian(f: Callable[[np.ndarray], float], M: np.ndarray,
               step: float = 1e-4) -> np.ndarray:
    """Central second differences over all coordinate pairs.

    Returns an N^2 x N^2 matrix indexed by flattened (row, col) coordinate
    pairs in row-major order, matching the dense closed-form Hessian.
    """
    M = np.asarray(M, dtype=float)
    N = M.shape[0]
    H = np.zeros((N * N, N * N))
    coords = [(w, x) for w in range(N) for x in range(N)]
    for u, (w, x) in enumerate(coords):
        for v, (y, z) in enumerate(coords):
            if v < u:
                continue
            E1 = np.zeros_like(M)
            E2 = np.zeros_like(M)
            E1[w, x] = step
            E2[y, z] = step
            val = (f(M + E1 + E2) - f(M + E1 - E2)
                   - f(M - E1 + E2) + f(M - E1 - E2)) / (4.0 * step * step)
            H[u, v] = H[v, u] = val
    return H


def qp_projection(M_raw: np.ndarray, dims: ProblemDims,
                  tol: float = 1e-9) -> np.ndarray:
    """Frobenius projection onto the pseudo-moment set via a generic solver.

    Independent of the Dykstra route: states the PSD, box, and block-sum
    constraints directly and hands them to cvxpy.
    """
    import cvxpy as cp

    n, L = dims.n_items, dims.n_labels
    side = dims.side
    X = cp.Variable((side, side), symmetric=True)
    constraints = [X >> 0, X >= 0, X <= 1]
    for i in range(n):
        for j in range(n):
            constraints.append(
                cp.sum(X[i * L:(i + 1) * L, j * L:(j + 1) * L]) == 1)
    # Kernel equalities implied by PSD + unit block sums:
    # (u_i - u_j)^T X (u_i - u_j) = 1 - 1 - 1 + 1 = 0 forces X (u_i - u_j)
    # = 0 for the item indicator vectors u_i.  Stating them explicitly
    # removes a degeneracy that otherwise lets the solver trade a 1e-9
    # residual for a 1e-4 distance error.
    u = np.zeros((n, side))
    for i in range(n):
        u[i, i * L:(i + 1) * L] = 1.0
    for d in range(1, n):
        constraints.append(X @ (u[0] - u[d]) == 0)
    prob = cp.Problem(cp.Minimize(cp.sum_squares(X - M_raw)), constraints)
    try:
        prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol,
                   tol_feas=tol, max_iter=200000)
        if prob.status != cp.OPTIMAL:
            raise cp.error.SolverError(prob.status)
    except (cp.error.SolverError, ValueError):
        prob.solve(solver=cp.SCS, eps=tol, max_iters=200000)
    if X.value is None:
        raise RuntimeError("QP projection oracle failed to solve")
    return 0.5 * (X.value + X.value.T)


def concave_argmax(C: np.ndarray, dims: ProblemDims) -> np.ndarray:
    """Maximize <C, M> + log det(I + L*M) over the set via a generic solver."""
    import cvxpy as cp

    n, L = dims.n_items, dims.n_labels
    side = dims.side
    X = cp.Variable((side, side), symmetric=True)
    constraints = [X >> 0, X >= 0, X <= 1]
    for i in range(n):
        for j in range(n):
            constraints.append(
                cp.sum(X[i * L:(i + 1) * L, j * L:(j + 1) * L]) == 1)
    # same implied kernel equalities as in qp_projection
    u = np.zeros((n, side))
    for i in range(n):
        u[i, i * L:(i + 1) * L] = 1.0
    for d in range(1, n):
        constraints.append(X @ (u[0] - u[d]) == 0)
    objective = cp.sum(cp.multiply(C, X)) + cp.log_det(np.eye(side) + L * X)
    prob = cp.Problem(cp.Maximize(objective), constraints)
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)
    if X.value is None:
        raise RuntimeError("concave argmax oracle failed to solve")
    return 0.5 * (X.value + X.value.T)
