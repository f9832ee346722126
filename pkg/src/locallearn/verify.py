"""Numerical verification suites for the regularizer and the polytope.

Each suite draws its own randomness from the supplied generator, checks a
closed-form claim against an independent route (finite differences, dense
matrix products, a generic QP solver), and reports pass/fail with the worst
observed deviation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracles, polytope, regularizer
from .polytope import ProblemDims, PseudoMomentMatrix


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    stats: dict = field(default_factory=dict)


def random_feasible_matrix(dims: ProblemDims,
                           rng: np.random.Generator) -> PseudoMomentMatrix:
    """A random feasible point: a mixture of labeling moment matrices.

    Each labeling x in [L]^n has moment matrix v v^T for its indicator
    vector v; any convex combination is exactly feasible (PSD, entries in
    [0, 1], unit block sums).
    """
    n, L = dims.n_items, dims.n_labels
    n_mix = int(rng.integers(2, 2 * dims.side + 2))
    weights = rng.dirichlet(np.ones(n_mix))
    M = np.zeros((dims.side, dims.side))
    for w in weights:
        labels = rng.integers(L, size=n)
        v = np.zeros(dims.side)
        v[np.arange(n) * L + labels] = 1.0
        M += w * np.outer(v, v)
    return PseudoMomentMatrix(dims, M)


DIMS_SWEEP = [ProblemDims(n, L) for n in (2, 3, 4) for L in (2, 3, 5)]


def gradient_suite(rng: np.random.Generator, grad_fn=None,
                   cases: int = 20, rel_tol: float = 1e-4) -> SuiteResult:
    """Analytic gradient against central finite differences (step 1e-5)."""
    if grad_fn is None:
        grad_fn = lambda M: regularizer.evaluate(M).gradient
    small = [d for d in DIMS_SWEEP if d.side <= 9] + [ProblemDims(1, 2)]
    worst = 0.0
    for c in range(cases):
        dims = small[c % len(small)]
        M = random_feasible_matrix(dims, rng)
        L = dims.n_labels

        def f(X, L=L):
            sign, logdet = np.linalg.slogdet(np.eye(X.shape[0]) + L * X)
            return logdet if sign > 0 else np.nan

        G_fd = oracles.fd_gradient(f, M.entries, step=1e-5)
        G = grad_fn(M)
        rel = np.linalg.norm(G - G_fd) / max(np.linalg.norm(G_fd), 1e-12)
        worst = max(worst, float(rel))
    return SuiteResult("gradient", worst <= rel_tol,
                       f"worst relative error {worst:.3e} (tol {rel_tol:g})",
                       {"worst_rel_error": worst})


def hessian_suite(rng: np.random.Generator, cases: int = 4,
                  id_tol: float = 1e-6,
                  fd_rel_tol: float = 1e-3) -> SuiteResult:
    """Closed-form H * Hinv = I, and H against finite differences."""
    dims_small = [ProblemDims(1, 2), ProblemDims(2, 2), ProblemDims(1, 3),
                  ProblemDims(2, 4), ProblemDims(4, 2)]
    worst_id = 0.0
    worst_fd = 0.0
    for c in range(cases):
        dims = dims_small[c % len(dims_small)]
        M = random_feasible_matrix(dims, rng)
        worst_id = max(worst_id,
                       regularizer.hessian_inverse_identity_check(M))
        L = dims.n_labels

        def f(X, L=L):
            sign, logdet = np.linalg.slogdet(np.eye(X.shape[0]) + L * X)
            return logdet if sign > 0 else np.nan

        H = regularizer.dense_hessian(M)
        H_fd = oracles.fd_hessian(f, M.entries, step=1e-4)
        rel = np.linalg.norm(H - H_fd) / np.linalg.norm(H)
        worst_fd = max(worst_fd, float(rel))
    passed = worst_id <= id_tol and worst_fd <= fd_rel_tol
    return SuiteResult(
        "hessian-inverse", passed,
        f"worst identity deviation {worst_id:.3e} (tol {id_tol:g}), "
        f"worst FD relative error {worst_fd:.3e} (tol {fd_rel_tol:g})",
        {"worst_identity_dev": worst_id, "worst_fd_rel": worst_fd})


def gamma_suite(rng: np.random.Generator,
                samples: int = 1000) -> SuiteResult:
    """|inverse-Hessian quadratic form| <= 4 over random payoff directions."""
    worst = 0.0
    violations = 0
    for s in range(samples):
        dims = DIMS_SWEEP[s % len(DIMS_SWEEP)]
        M = random_feasible_matrix(dims, rng)
        i, j = rng.choice(dims.n_items, size=2, replace=False)
        P = rng.uniform(-1.0, 1.0, size=(dims.n_labels, dims.n_labels))
        value = abs(regularizer.inv_hessian_quadform(M, int(i), int(j), P).value)
        worst = max(worst, value)
        if value > regularizer.GAMMA_BOUND:
            violations += 1
    return SuiteResult(
        "gamma-bound", violations == 0,
        f"max |quadform| {worst:.6f} over {samples} samples "
        f"(bound {regularizer.GAMMA_BOUND:g}, violations {violations})",
        {"max_quadform": worst, "violations": violations})


def projection_suite(rng: np.random.Generator, cases: int = 10,
                     tol: float = 1e-4) -> SuiteResult:
    """Dykstra projection against the generic convex-QP oracle at nL = 4."""
    dims = ProblemDims(2, 2)
    worst = 0.0
    for _ in range(cases):
        raw = rng.uniform(-1.5, 1.5, size=(4, 4))
        raw = 0.5 * (raw + raw.T)
        ours = polytope.project(raw, dims).matrix.entries
        ref = oracles.qp_projection(raw, dims)
        worst = max(worst, float(np.linalg.norm(ours - ref)))
    return SuiteResult(
        "projection-oracle", worst <= tol,
        f"worst Frobenius distance to QP oracle {worst:.3e} (tol {tol:g})",
        {"worst_distance": worst})


def feasibility_suite(rng: np.random.Generator,
                      cases: int = 100) -> SuiteResult:
    """Projected points are feasible; |log det(I + L*M)| <= n*L throughout."""
    worst_excess = -np.inf
    all_feasible = True
    for c in range(cases):
        dims = DIMS_SWEEP[c % len(DIMS_SWEEP)]
        if c % 2 == 0:
            M = random_feasible_matrix(dims, rng)
        else:
            raw = rng.uniform(-1.0, 1.5, size=(dims.side, dims.side))
            result = polytope.project(0.5 * (raw + raw.T), dims)
            M = result.matrix
            if not polytope.is_feasible(M, 10 * polytope.DEFAULT_PROJ_TOL
                                        + polytope.DEFAULT_FEAS_TOL):
                all_feasible = False
        value = abs(regularizer.evaluate(M).value)
        worst_excess = max(worst_excess,
                           value - regularizer.diameter_bound(dims))
    passed = all_feasible and worst_excess <= 0.0
    return SuiteResult(
        "feasibility-diameter", passed,
        f"all projections feasible: {all_feasible}; worst |R(M)| - nL = "
        f"{worst_excess:.3e}",
        {"worst_diameter_excess": worst_excess})


def run_all(seed: int) -> list[SuiteResult]:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return [
        gradient_suite(rng),
        hessian_suite(rng),
        gamma_suite(rng),
        projection_suite(rng),
        feasibility_suite(rng),
    ]
