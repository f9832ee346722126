"""Follow-the-regularized-leader over the pseudo-moment polytope.

Each round maximizes nu * <cumulative payoff, M> + log det(I + L*M) over the
polytope by accelerated projected gradient ascent, warm-started from the
previous iterate.  Payoff blocks live in [-1, 1]^(L x L) and are counted
once per unordered item pair: a block P on pair (i, j) is stored as P/2 in
the (i, j) block and P^T/2 in the (j, i) block, so the full Frobenius inner
product with a symmetric M equals sum_{a,b} P[a,b] * M[(i,a),(j,b)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import polytope, regularizer
from .environments import PayoffFunction
from .polytope import ProblemDims, PseudoMomentMatrix


@dataclass(frozen=True)
class InnerSolverConfig:
    step_size: float
    max_iters: int = 500
    grad_tol: float = 1e-6
    proj_tol: float = polytope.DEFAULT_PROJ_TOL
    proj_max_iters: int = polytope.DEFAULT_PROJ_MAX_ITERS

    def __post_init__(self) -> None:
        if self.step_size <= 0 or self.max_iters <= 0 or self.grad_tol <= 0:
            raise ValueError("inner solver parameters must be positive")


def default_inner_config(L: int) -> InnerSolverConfig:
    # the log-det gradient is L^2-Lipschitz on the PSD part of the polytope,
    # so 1/L^2 is the largest step that is guaranteed to ascend
    return InnerSolverConfig(step_size=1.0 / (L * L))


class InnerSolveInfo(NamedTuple):
    iterations: int
    residual: float
    converged: bool
    objective: float


@dataclass
class FtrlState:
    dims: ProblemDims
    nu: float
    cum_payoff: np.ndarray
    current: PseudoMomentMatrix
    inner_cfg: InnerSolverConfig
    last_inner: InnerSolveInfo = field(
        default=InnerSolveInfo(0, 0.0, True, 0.0))


@dataclass(frozen=True)
class RoundRecord:
    t: int
    pair: tuple[int, int]
    predicted: tuple[int, int]
    payoff_received: float
    expected_payoff: float
    inner_iters: int = 0
    inner_residual: float = 0.0


def _objective(C: np.ndarray, X: np.ndarray, L: int) -> float:
    B = np.eye(X.shape[0]) + L * X
    sign, logdet = np.linalg.slogdet(0.5 * (B + B.T))
    if sign <= 0:
        return -math.inf
    return float(np.sum(C * X)) + logdet


def _gradient(C: np.ndarray, X: np.ndarray, L: int,
              side: int) -> np.ndarray | None:
    B = np.eye(side) + L * 0.5 * (X + X.T)
    w, V = np.linalg.eigh(B)
    if w[0] <= 1e-12:
        return None
    return C + L * ((V / w) @ V.T)


def inner_solve(C: np.ndarray, dims: ProblemDims, cfg: InnerSolverConfig,
                warm: PseudoMomentMatrix) -> tuple[PseudoMomentMatrix, InnerSolveInfo]:
    """Maximize <C, M> + log det(I + L*M) over the polytope.

    Accelerated projected gradient ascent (FISTA-style momentum with
    adaptive restart) at the fixed step from inner_cfg; the gradient of the
    log-det term is L^2-Lipschitz on the polytope, so step sizes up to
    1/L^2 ascend without a line search.  Stops when the gradient-mapping
    norm (projected step displacement over step size) drops below
    grad_tol.  Momentum extrapolation points that leave the domain of the
    log-det term trigger a restart from the last feasible iterate.
    """
    L = dims.n_labels
    C = 0.5 * (C + C.T)
    eta = cfg.step_size
    X = warm.entries.copy()
    f_best = _objective(C, X, L)
    X_best = X
    Y = X
    t_momentum = 1.0
    it = 0
    residual = np.inf
    converged = False
    for it in range(1, cfg.max_iters + 1):
        G = _gradient(C, Y, L, dims.side)
        if G is None:
            # extrapolation overshot the barrier's domain; restart plain
            Y = X
            t_momentum = 1.0
            G = _gradient(C, Y, L, dims.side)
        X_new = polytope.project(Y + eta * G, dims, tol=cfg.proj_tol,
                                 max_iters=cfg.proj_max_iters).matrix.entries
        residual = float(np.linalg.norm(X_new - Y)) / eta
        if residual < cfg.grad_tol:
            X = X_new
            converged = True
            break
        # adaptive restart: kill momentum when it opposes the new step
        if float(np.sum((Y - X_new) * (X_new - X))) > 0.0:
            t_momentum = 1.0
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_momentum * t_momentum))
        Y = X_new + ((t_momentum - 1.0) / t_next) * (X_new - X)
        X = X_new
        t_momentum = t_next
    f = _objective(C, X, L)
    if f < f_best:
        # monotone safeguard relative to the warm start
        X, f = X_best, f_best
    return (PseudoMomentMatrix(dims, X),
            InnerSolveInfo(it, residual, converged, f))


def init(dims: ProblemDims, nu: float,
         inner_cfg: InnerSolverConfig | None = None) -> FtrlState:
    """Fresh state at the regularizer's maximizer over the polytope."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    if inner_cfg is None:
        inner_cfg = default_inner_config(dims.n_labels)
    zero = np.zeros((dims.side, dims.side))
    current, info = inner_solve(zero, dims, inner_cfg,
                                polytope.uniform_matrix(dims))
    return FtrlState(dims, nu, zero.copy(), current, inner_cfg, info)


def predict(state: FtrlState, i: int, j: int,
            rng: np.random.Generator) -> tuple[int, int]:
    """Sample a label pair from the current iterate's (i, j) block."""
    sample = polytope.sample_block(state.current, i, j, rng)
    return sample.a, sample.b


def expected_payoff(state: FtrlState, payoff: PayoffFunction) -> float:
    """<payoff block, current (i, j) block>, the pre-update expectation."""
    i, j = payoff.pair
    return float(np.sum(payoff.block * state.current.block(i, j)))


def update(state: FtrlState, payoff: PayoffFunction) -> FtrlState:
    """Fold one payoff into the cumulative sum and re-solve the argmax."""
    i, j = payoff.pair
    L = state.dims.n_labels
    P = np.asarray(payoff.block, dtype=float)
    if np.max(np.abs(P)) > 1.0 + 1e-12:
        raise ValueError("payoff block entries must lie in [-1, 1]")
    cum = state.cum_payoff.copy()
    cum[i * L:(i + 1) * L, j * L:(j + 1) * L] += 0.5 * P
    cum[j * L:(j + 1) * L, i * L:(i + 1) * L] += 0.5 * P.T
    current, info = inner_solve(state.nu * cum, state.dims, state.inner_cfg,
                                state.current)
    return replace(state, cum_payoff=cum, current=current, last_inner=info)


def choose_nu(dims: ProblemDims, T: int) -> float:
    """sqrt(D / (gamma T)) with D = n*L and gamma = 4."""
    if T < 1:
        raise ValueError("T must be >= 1")
    return math.sqrt(regularizer.diameter_bound(dims) /
                     (regularizer.GAMMA_BOUND * T))
