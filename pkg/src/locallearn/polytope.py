"""Pseudo-moment polytope over (item, label) index pairs.

The feasible set K consists of symmetric positive semidefinite matrices of
side n*L, with entries in [0, 1], such that every L x L item-pair block sums
to one.  Matrices in K relax distributions over labelings: the (i, a), (j, b)
entry stands for the probability that item i gets label a while item j gets
label b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_FEAS_TOL = 1e-7
DEFAULT_PROJ_TOL = 1e-9
DEFAULT_PROJ_MAX_ITERS = 2000


@dataclass(frozen=True)
class ProblemDims:
    """Problem size: n_items items, n_labels labels per item."""

    n_items: int
    n_labels: int

    def __post_init__(self) -> None:
        if self.n_items < 1:
            raise ValueError(f"n_items must be >= 1, got {self.n_items}")
        if self.n_labels < 1:
            raise ValueError(f"n_labels must be >= 1, got {self.n_labels}")

    @property
    def side(self) -> int:
        return self.n_items * self.n_labels

    def index(self, item: int, label: int) -> int:
        """Flat row/column index of the (item, label) pair."""
        return item * self.n_labels + label


@dataclass
class PseudoMomentMatrix:
    """Symmetric matrix of side n*L indexed by (item, label) pairs."""

    dims: ProblemDims
    entries: np.ndarray

    def __post_init__(self) -> None:
        self.entries = np.array(self.entries, dtype=float)
        side = self.dims.side
        if self.entries.shape != (side, side):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match side {side}"
            )

    def block(self, i: int, j: int) -> np.ndarray:
        """The L x L block for the item pair (i, j) (a view into entries)."""
        L = self.dims.n_labels
        return self.entries[i * L:(i + 1) * L, j * L:(j + 1) * L]

    def copy(self) -> "PseudoMomentMatrix":
        return PseudoMomentMatrix(self.dims, self.entries.copy())


@dataclass(frozen=True)
class FeasibilityReport:
    """Worst violation per constraint class; ok means all within tol."""

    ok: bool
    tol: float
    max_asymmetry: float
    box_violation: float
    block_sum_violation: float
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.ok


class ProjectionResult(NamedTuple):
    matrix: PseudoMomentMatrix
    converged: bool
    residual: float
    iterations: int


class BlockSample(NamedTuple):
    a: int
    b: int
    uniform_fallback: bool


def uniform_matrix(dims: ProblemDims) -> PseudoMomentMatrix:
    """The canonical feasible point: rank-one all-(1/L^2) matrix."""
    L = dims.n_labels
    entries = np.full((dims.side, dims.side), 1.0 / (L * L))
    return PseudoMomentMatrix(dims, entries)


def is_feasible(M: PseudoMomentMatrix,
                tol: float = DEFAULT_FEAS_TOL) -> FeasibilityReport:
    """Check all four membership constraints of K within tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    X = M.entries
    side = M.dims.side
    if X.shape != (side, side):
        raise ValueError("dimension mismatch between dims and entries")
    asym = float(np.max(np.abs(X - X.T))) if side > 0 else 0.0
    box = float(max(np.max(-X), np.max(X - 1.0), 0.0))
    sums = _block_sums(X, M.dims)
    block_dev = float(np.max(np.abs(sums - 1.0)))
    min_eig = float(np.linalg.eigvalsh(0.5 * (X + X.T))[0])
    ok = (asym <= tol and box <= tol and block_dev <= tol and min_eig >= -tol)
    return FeasibilityReport(ok, tol, asym, box, block_dev, min_eig)


def _block_sums(X: np.ndarray, dims: ProblemDims) -> np.ndarray:
    n, L = dims.n_items, dims.n_labels
    return X.reshape(n, L, n, L).sum(axis=(1, 3))


def _project_psd(X: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: clamp eigenvalues at zero."""
    w, V = np.linalg.eigh(0.5 * (X + X.T))
    w = np.clip(w, 0.0, None)
    Y = (V * w) @ V.T
    return 0.5 * (Y + Y.T)


_HULL_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _affine_hull_projector(dims: ProblemDims) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal projector data for the affine hull of K.

    The hull is cut out by the block sums (u_i^T X u_j = 1 for the item
    indicator vectors u_i) together with the kernel equalities
    X (u_i - u_j) = 0, which every PSD matrix with unit block sums
    satisfies: (u_i - u_j)^T X (u_i - u_j) = 0 forces u_i - u_j into the
    kernel.  Returns (base point flattened, row-space basis V with
    projection x -> x - V (V^T (x - base))).
    """
    key = (dims.n_items, dims.n_labels)
    if key in _HULL_CACHE:
        return _HULL_CACHE[key]
    n, L, N = dims.n_items, dims.n_labels, dims.side
    u = np.zeros((n, N))
    for i in range(n):
        u[i, i * L:(i + 1) * L] = 1.0
    rows = []
    for i in range(n):
        for j in range(i, n):
            R = np.outer(u[i], u[j])
            rows.append((0.5 * (R + R.T)).ravel())
    eye = np.eye(N)
    for d in range(1, n):
        v = u[0] - u[d]
        for r in range(N):
            R = np.outer(eye[r], v)
            rows.append((0.5 * (R + R.T)).ravel())
    A = np.array(rows)
    _, s, Vt = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    base = uniform_matrix(dims).entries.ravel()
    _HULL_CACHE[key] = (base, Vt[:rank].T.copy())
    return _HULL_CACHE[key]


def _project_affine_hull(X: np.ndarray, dims: ProblemDims) -> np.ndarray:
    base, V = _affine_hull_projector(dims)
    x = X.ravel() - base
    y = x - V @ (V.T @ x)
    Y = (base + y).reshape(X.shape)
    return 0.5 * (Y + Y.T)


def project(M_raw: np.ndarray,
            dims: ProblemDims,
            tol: float = DEFAULT_PROJ_TOL,
            max_iters: int = DEFAULT_PROJ_MAX_ITERS) -> ProjectionResult:
    """Euclidean (Frobenius) projection onto K by Dykstra alternation.

    Cycles exact projections onto three sets whose intersection is K: the
    PSD cone (eigenvalue clamping at zero), the affine hull of K (block
    sums plus the kernel equalities they force on PSD matrices), and the
    [0, 1] box (entry clamping), each with its Dykstra correction term, so
    the limit is the exact projection onto the intersection.  Cycling
    through the affine hull rather than the block-sum constraints alone is
    what keeps the iteration from crawling: without the kernel equalities
    the PSD and block-sum sets meet only degenerately and plain Dykstra
    slows to a sublinear rate near feasible inputs.  Stops when successive
    cycles differ by less than tol in Frobenius norm.
    """
    X = 0.5 * (np.asarray(M_raw, dtype=float) + np.asarray(M_raw, dtype=float).T)
    if X.shape != (dims.side, dims.side):
        raise ValueError("M_raw shape does not match dims")
    e_psd = np.zeros_like(X)
    e_hull = np.zeros_like(X)
    e_box = np.zeros_like(X)
    residual = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        X_prev = X
        Y = _project_psd(X + e_psd)
        e_psd = X + e_psd - Y
        Z = _project_affine_hull(Y + e_hull, dims)
        e_hull = Y + e_hull - Z
        X = np.clip(Z + e_box, 0.0, 1.0)
        e_box = Z + e_box - X
        residual = float(np.linalg.norm(X - X_prev))
        if residual < tol:
            break
    return ProjectionResult(PseudoMomentMatrix(dims, X), residual < tol,
                            residual, it)


def sample_block(M: PseudoMomentMatrix, i: int, j: int,
                 rng: np.random.Generator) -> BlockSample:
    """Draw a label pair (a, b) proportional to the clamped (i, j) block.

    Negative entries (round-off from the inner solver) are clamped to zero
    and the block renormalized.  A block with no positive mass falls back to
    the uniform distribution over label pairs, flagged in the result.
    """
    if i == j:
        raise ValueError("sample_block needs two distinct items")
    L = M.dims.n_labels
    weights = np.clip(M.block(i, j), 0.0, None).ravel()
    total = weights.sum()
    if total <= 0.0:
        idx = int(rng.integers(L * L))
        return BlockSample(idx // L, idx % L, True)
    idx = int(rng.choice(L * L, p=weights / total))
    return BlockSample(idx // L, idx % L, False)


def save_matrix(M: PseudoMomentMatrix, path) -> None:
    """Write the plain-text format: header `n L`, then row-major decimals."""
    with open(path, "w") as fh:
        fh.write(f"{M.dims.n_items} {M.dims.n_labels}\n")
        for row in M.entries:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_matrix(path) -> PseudoMomentMatrix:
    with open(path) as fh:
        n, L = map(int, fh.readline().split())
        dims = ProblemDims(n, L)
        entries = np.loadtxt(fh, ndmin=2)
    return PseudoMomentMatrix(dims, entries)
