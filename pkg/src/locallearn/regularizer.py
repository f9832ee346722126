"""Log-determinant regularizer log det(I + L*M) and its derivatives.

Everything goes through one symmetric eigendecomposition of B = I + L*M:
the value is the sum of log eigenvalues, the gradient is L * B^{-1}, and the
inverse Hessian has the closed factored form used by the curvature bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polytope import ProblemDims, PseudoMomentMatrix

GAMMA_BOUND = 4.0


@dataclass(frozen=True)
class RegularizerEval:
    value: float
    gradient: np.ndarray


@dataclass(frozen=True)
class QuadFormResult:
    """Payoff-direction quadratic form of the inverse Hessian."""

    value: float
    block_sum: float


def _eig_of_shifted(M: np.ndarray, L: int):
    B = np.eye(M.shape[0]) + L * 0.5 * (M + M.T)
    w, V = np.linalg.eigh(B)
    if w[0] <= 0.0:
        raise ValueError(
            f"I + L*M is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return w, V


def evaluate(M: PseudoMomentMatrix, L: int | None = None) -> RegularizerEval:
    """Value and analytic gradient of log det(I + L*M).

    The gradient is L * (I + L*M)^{-1}, symmetric by construction.
    """
    if L is None:
        L = M.dims.n_labels
    w, V = _eig_of_shifted(M.entries, L)
    value = float(np.sum(np.log(w)))
    Binv = (V / w) @ V.T
    grad = L * 0.5 * (Binv + Binv.T)
    return RegularizerEval(value, grad)


def diameter_bound(dims: ProblemDims) -> float:
    """Upper bound n*L on |log det(I + L*M)| over the feasible set."""
    return float(dims.n_items * dims.n_labels)


def inv_hessian_quadform(M: PseudoMomentMatrix, i: int, j: int,
                         P: np.ndarray) -> QuadFormResult:
    """Quadratic form of a single-block payoff in the inverse Hessian.

    With B = I + L*M and K the (i, j) block of B, the factored form is
    -(1/L^2) * tr((P K^T)^2); the full fourth-order tensor is never built.
    """
    L = M.dims.n_labels
    P = np.asarray(P, dtype=float)
    if P.shape != (L, L):
        raise ValueError(f"payoff block must be {L}x{L}")
    B = np.eye(M.dims.side) + L * M.entries
    K = B[i * L:(i + 1) * L, j * L:(j + 1) * L]
    PKt = P @ K.T
    value = -float(np.trace(PKt @ PKt)) / (L * L)
    return QuadFormResult(value, float(K.sum()))


def dense_hessian(M: PseudoMomentMatrix) -> np.ndarray:
    """The full Hessian as an (nL)^2 x (nL)^2 matrix (test scale only)."""
    _check_dense_scale(M)
    L = M.dims.n_labels
    N = M.dims.side
    w, V = _eig_of_shifted(M.entries, L)
    Binv = (V / w) @ V.T
    H = -(L * L) * np.einsum("xy,zw->wxyz", Binv, Binv)
    return H.reshape(N * N, N * N)


def dense_hessian_inverse(M: PseudoMomentMatrix) -> np.ndarray:
    """Closed-form inverse Hessian, materialized densely (test scale only)."""
    _check_dense_scale(M)
    L = M.dims.n_labels
    N = M.dims.side
    B = np.eye(N) + L * M.entries
    Hinv = -np.einsum("xy,wz->wxyz", B, B) / (L * L)
    return Hinv.reshape(N * N, N * N)


def hessian_inverse_identity_check(M: PseudoMomentMatrix) -> float:
    """Max entrywise deviation of H @ Hinv from the identity."""
    H = dense_hessian(M)
    Hinv = dense_hessian_inverse(M)
    N2 = H.shape[0]
    return float(np.max(np.abs(H @ Hinv - np.eye(N2))))


def _check_dense_scale(M: PseudoMomentMatrix) -> None:
    if M.dims.side > 8:
        raise ValueError(
            f"dense Hessian limited to side <= 8, got {M.dims.side}"
        )
