"""Symmetric eigendecomposition, low-rank truncation, and USVT estimates.

Symmetric inputs are decomposed with a symmetric eigensolver; singular values
are the absolute eigenvalues and eigenvectors stay paired with their signed
eigenvalues, so truncation reproduces the best rank-k approximation exactly.
Large matrices with few requested components go through a Lanczos solver with
a fixed starting vector, keeping results deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from .graphs import GraphCorrError, _check_square_symmetric, _freeze

# below this size (or for large ranks) a full dense decomposition is cheaper
_LANCZOS_MIN_N = 400
_LANCZOS_MAX_K = 16


class RankZeroWarning(RuntimeWarning):
    """Every singular value fell below the USVT threshold; estimate is zero."""


@dataclass(frozen=True)
class UsvtConfig:
    """Truncation rule for USVT estimates.

    ``rank`` keeps exactly that many top singular components.  When ``rank``
    is None the threshold rule keeps singular values at least
    ``c0 * sqrt(n * rho_hat)`` with ``rho_hat`` estimated from the matrix sum.
    ``clip`` clamps the reconstruction into [0, 1].
    """

    rank: int | None = None
    c0: float = 4.01
    clip: bool = True

    def __post_init__(self):
        if self.rank is not None and self.rank < 1:
            raise GraphCorrError("rank must be at least 1")
        if self.rank is None and self.c0 <= 0:
            raise GraphCorrError("threshold constant c0 must be positive")


def _top_components(M: np.ndarray, k: int):
    """Top-k eigenpairs by absolute eigenvalue, deterministically."""
    n = M.shape[0]
    if n >= _LANCZOS_MIN_N and k <= _LANCZOS_MAX_K and k < n - 1:
        if not M.any():
            return np.zeros(k), np.eye(n, k)
        try:
            v0 = np.full(n, 1.0 / np.sqrt(n))
            w, V = eigsh(M, k=k, which="LM", v0=v0)
            order = np.argsort(np.abs(w))[::-1]
            return w[order], V[:, order]
        except (ArpackError, ArpackNoConvergence):
            pass  # fall through to the dense path
    w, V = np.linalg.eigh(M)
    order = np.argsort(np.abs(w))[::-1][:k]
    return w[order], V[:, order]


def top_singular_truncation(M: np.ndarray, k: int) -> np.ndarray:
    """Best rank-k approximation of a symmetric matrix (top-k singular triplets)."""
    M = _check_square_symmetric(M, "input matrix", tol=1e-10)
    n = M.shape[0]
    if not (1 <= k <= n):
        raise GraphCorrError(f"rank {k} outside [1, {n}]")
    w, V = _top_components(M, k)
    out = (V * w) @ V.T
    return _freeze((out + out.T) / 2)


def usvt(M: np.ndarray, cfg: UsvtConfig = UsvtConfig()) -> np.ndarray:
    """Universal singular value thresholding estimate of a mean matrix.

    In threshold mode the unknown scale ``n * rho`` is estimated by the entry
    sum over ``n - 1`` (a mean-degree proxy for graph inputs) and components
    with singular value below ``c0 * sqrt(n * rho_hat)`` are discarded.  If
    nothing survives, a zero matrix is returned under :class:`RankZeroWarning`
    so calibration loops keep running.
    """
    M = _check_square_symmetric(M, "input matrix", tol=1e-10)
    n = M.shape[0]
    if cfg.rank is not None:
        if cfg.rank > n:
            raise GraphCorrError(f"rank {cfg.rank} exceeds size {n}")
        w, V = _top_components(M, cfg.rank)
    else:
        nrho = max(float(M.sum()) / (n - 1), 0.0) if n > 1 else 0.0
        thresh = cfg.c0 * np.sqrt(nrho)
        w, V = np.linalg.eigh(M)
        keep = np.abs(w) >= thresh
        if not np.any(keep):
            warnings.warn(
                f"all singular values below threshold {thresh:.4g}; "
                "returning the zero matrix",
                RankZeroWarning,
            )
            return _freeze(np.zeros((n, n)))
        w, V = w[keep], V[:, keep]
    out = (V * w) @ V.T
    if cfg.clip:
        out = np.clip(out, 0.0, 1.0)
    return _freeze((out + out.T) / 2)


def usvt_rank(M: np.ndarray, cfg: UsvtConfig = UsvtConfig()) -> int:
    """Number of singular components the given rule would keep."""
    M = _check_square_symmetric(M, "input matrix", tol=1e-10)
    n = M.shape[0]
    if cfg.rank is not None:
        return min(cfg.rank, n)
    nrho = max(float(M.sum()) / (n - 1), 0.0) if n > 1 else 0.0
    thresh = cfg.c0 * np.sqrt(nrho)
    w = np.linalg.eigvalsh(M)
    return int(np.sum(np.abs(w) >= thresh))


def lambda1(M: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    M = _check_square_symmetric(M, "input matrix", tol=1e-10)
    n = M.shape[0]
    if n >= _LANCZOS_MIN_N and M.any():
        try:
            v0 = np.full(n, 1.0 / np.sqrt(n))
            w = eigsh(M, k=1, which="LA", v0=v0, return_eigenvectors=False)
            return float(w[0])
        except (ArpackError, ArpackNoConvergence):
            pass
    return float(np.linalg.eigvalsh(M)[-1])
