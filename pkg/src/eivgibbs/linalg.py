"""SPD linear-algebra utilities used throughout the sampler."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, SpdError

SYMMETRY_RTOL = 1e-12


def as_spd(S, name: str = "matrix") -> np.ndarray:
    """Validate that S is symmetric positive definite and return it as an array.

    Symmetry is checked to relative tolerance, positive definiteness by
    attempting a Cholesky factorization. No jitter is applied on failure.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {S.shape}")
    scale = max(np.abs(S).max(), 1.0)
    if np.abs(S - S.T).max() > SYMMETRY_RTOL * scale * S.shape[0]:
        raise SpdError(f"{name} is not symmetric")
    cholesky_spd(S, name)
    return S


def cholesky_spd(S, name: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor of an SPD matrix; raises SpdError naming it."""
    S = np.asarray(S, dtype=float)
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise SpdError(f"{name} is not positive definite: {exc}") from exc


def chol_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = b given a lower Cholesky factor L."""
    return sla.cho_solve((L, True), b, check_finite=False)


def chol_inverse(L: np.ndarray) -> np.ndarray:
    """Inverse of the SPD matrix with lower Cholesky factor L, symmetrized."""
    inv = sla.cho_solve((L, True), np.eye(L.shape[0]), check_finite=False)
    return 0.5 * (inv + inv.T)


def symmetric_sqrt(S, name: str = "matrix") -> np.ndarray:
    """Symmetric positive-definite square root via eigendecomposition.

    Eigendecomposition (rather than Cholesky) is used so the square
    root's spectrum is exactly the square roots of S's eigenvalues,
    which is what the standard-error eigenvalue diagnostics report.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {S.shape}")
    w, Q = np.linalg.eigh(0.5 * (S + S.T))
    if w[0] < -1e-12 * max(abs(w[-1]), 1.0):
        raise SpdError(f"{name} is not positive semidefinite (min eig {w[0]:.3e})")
    root = (Q * np.sqrt(np.clip(w, 0.0, None))) @ Q.T
    return 0.5 * (root + root.T)


def logdet_spd(S, name: str = "matrix") -> float:
    """log det of an SPD matrix via Cholesky."""
    L = cholesky_spd(S, name)
    return 2.0 * float(np.sum(np.log(np.diag(L))))
