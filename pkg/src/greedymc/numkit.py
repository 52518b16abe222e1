"""Dense real-matrix primitives: norms, inner product, SVD, shrinkage.

All operations are pure functions on 2-D float64 arrays.  Inputs are
validated once through :func:`as_matrix`; every exported operation returns
finite values or raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, NumericError


def as_matrix(a, name: str = "a") -> np.ndarray:
    """Coerce ``a`` to a C-contiguous float64 2-D array with finite entries."""
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise ArgumentError(f"{name} must be a non-empty 2-D real matrix")
    if not np.isfinite(out).all():
        raise ArgumentError(f"{name} contains NaN or Inf entries")
    return out


def shrink(x, epsilon: float):
    """Soft-threshold ``x`` toward zero by ``epsilon``.

    Element-wise: returns ``x - epsilon`` where ``x > epsilon``,
    ``x + epsilon`` where ``x < -epsilon`` and 0 on the dead zone in
    between.  Accepts a scalar or a matrix and returns the same shape;
    ``shrink(x, 0)`` is the identity.
    """
    if epsilon < 0:
        raise ArgumentError("epsilon must be non-negative")
    arr = np.asarray(x, dtype=np.float64)
    out = np.where(arr > epsilon, arr - epsilon,
                   np.where(arr < -epsilon, arr + epsilon, 0.0))
    if arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SvdResult:
    """Economy singular value decomposition ``a = u @ diag(s) @ vt``.

    ``u`` is m-by-k with orthonormal columns, ``singular_values`` holds the
    k = min(m, n) values in non-increasing order and ``vt`` is k-by-n with
    orthonormal rows.
    """

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray

    def compose(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.vt


def svd(a) -> SvdResult:
    """Economy SVD with a deterministic sign convention.

    Each left singular vector is flipped so that its largest-magnitude
    entry is non-negative (ties broken toward the lowest row index); the
    matching row of ``vt`` is flipped along with it, so the product is
    unchanged.
    """
    mat = as_matrix(a)
    try:
        u, s, vt = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"SVD failed to converge for a {mat.shape[0]}x{mat.shape[1]} matrix"
        ) from exc
    cols = np.arange(u.shape[1])
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[pivots, cols] < 0, -1.0, 1.0)
    return SvdResult(u=u * signs, singular_values=s, vt=vt * signs[:, None])


def elementwise_norm(a, p: float) -> float:
    """Entry-wise p-norm ``(sum |a_ij|^p)^(1/p)`` for p > 0.

    p = 2 is the Frobenius norm; values p < 1 evaluate the same formula
    (a quasi-norm, no triangle inequality).  For the sparsity count use
    :func:`hamming_weight`.
    """
    if p <= 0:
        raise ArgumentError("p must be positive; use hamming_weight for the p=0 count")
    mat = as_matrix(a)
    return float(np.sum(np.abs(mat) ** p) ** (1.0 / p))


def hamming_weight(a, zero_tol: float = 1e-12) -> int:
    """Number of entries with ``|a_ij| > zero_tol``."""
    if zero_tol < 0:
        raise ArgumentError("zero_tol must be non-negative")
    mat = as_matrix(a)
    return int(np.count_nonzero(np.abs(mat) > zero_tol))


def nuclear_norm(a) -> float:
    """Sum of the singular values of ``a``."""
    return float(np.sum(svd(a).singular_values))


def operator_norms(a) -> tuple[float, float]:
    """Return ``(spectral, op_inf)`` operator norms of ``a``.

    ``spectral`` is the largest singular value; ``op_inf`` is the maximum
    absolute row sum.
    """
    mat = as_matrix(a)
    spectral = float(svd(mat).singular_values[0])
    op_inf = float(np.max(np.sum(np.abs(mat), axis=1)))
    return spectral, op_inf


def inner_product(a, b) -> float:
    """Trace inner product ``sum_ij a_ij * b_ij``."""
    mat_a = as_matrix(a, "a")
    mat_b = as_matrix(b, "b")
    if mat_a.shape != mat_b.shape:
        raise ArgumentError(
            f"shape mismatch: {mat_a.shape} vs {mat_b.shape}"
        )
    return float(np.sum(mat_a * mat_b))
