"""Dense linear-algebra primitives for Gram matrices.

Everything here operates on small dense ``float64`` arrays. Gram matrices
are symmetric positive semi-definite up to round-off, so the pseudoinverse
and inverse square root go through a symmetric eigendecomposition with a
relative eigenvalue cut-off instead of an SVD.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import InvalidInputError

__all__ = [
    "FilteredEigh",
    "check_symmetric",
    "eigh_psd",
    "pinv_psd",
    "inv_sqrt_psd",
    "hadamard",
    "quad_form",
]

_SYMMETRY_TOL = 1e-12


class FilteredEigh(NamedTuple):
    """Eigenpairs kept after thresholding, plus how many were discarded."""

    values: np.ndarray
    vectors: np.ndarray
    n_dropped: int


def check_symmetric(K) -> np.ndarray:
    """Return ``K`` as a float array, raising if it is not square and symmetric."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise InvalidInputError("matrix contains NaN or infinite entries")
    scale = np.max(np.abs(K)) if K.size else 0.0
    if scale > 0 and np.max(np.abs(K - K.T)) > _SYMMETRY_TOL * scale:
        raise InvalidInputError("matrix is not symmetric")
    return K


def eigh_psd(K, rel_tol: float | None = None) -> FilteredEigh:
    """Eigendecompose a symmetric PSD matrix and drop negligible directions.

    Negative eigenvalues (round-off) are clamped to zero, then every
    eigenvalue ``<= rel_tol * max(lambda_max, 0)`` is discarded. The default
    ``rel_tol`` is ``order * eps``.
    """
    K = check_symmetric(K)
    n = K.shape[0]
    if rel_tol is None:
        rel_tol = n * np.finfo(float).eps
    if rel_tol < 0:
        raise InvalidInputError("rel_tol must be nonnegative")
    if n == 0:
        return FilteredEigh(np.empty(0), np.empty((0, 0)), 0)
    vals, vecs = np.linalg.eigh(0.5 * (K + K.T))
    vals = np.clip(vals, 0.0, None)
    cutoff = rel_tol * max(vals[-1], 0.0)
    keep = vals > cutoff
    return FilteredEigh(vals[keep], vecs[:, keep], int(n - keep.sum()))


def pinv_psd(K, rel_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric PSD matrix.

    >>> pinv_psd([[2.0, 0.0], [0.0, 0.0]])
    array([[0.5, 0. ],
           [0. , 0. ]])
    """
    vals, vecs, _ = eigh_psd(K, rel_tol)
    out = (vecs / vals) @ vecs.T
    return 0.5 * (out + out.T)


def inv_sqrt_psd(K, rel_tol: float | None = None) -> tuple[np.ndarray, int]:
    """Filtered inverse square root ``K^{-1/2}`` and the number of dropped directions."""
    vals, vecs, dropped = eigh_psd(K, rel_tol)
    out = (vecs / np.sqrt(vals)) @ vecs.T
    return 0.5 * (out + out.T), dropped


def hadamard(mats: Sequence) -> np.ndarray:
    """Elementwise product of equally shaped matrices, folded left to right."""
    mats = [np.asarray(m, dtype=float) for m in mats]
    if not mats:
        raise InvalidInputError("hadamard needs at least one factor")
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise InvalidInputError(f"shape mismatch: {m.shape} vs {shape}")
    if len(mats) == 1:
        return mats[0].copy()
    return reduce(np.multiply, mats)


def quad_form(alpha, K, beta) -> float:
    """Bilinear form ``alpha^T K beta``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    K = np.asarray(K, dtype=float)
    if (
        alpha.ndim != 1
        or beta.ndim != 1
        or K.ndim != 2
        or K.shape != (alpha.shape[0], beta.shape[0])
    ):
        raise InvalidInputError(
            f"incompatible shapes {alpha.shape}, {K.shape}, {beta.shape}"
        )
    return float(alpha @ (K @ beta))
