"""Exact samplers and log-densities for the conditional updates.

Multivariate normal, Wishart (Bartlett construction), and
inverse-Wishart draws on the :class:`~eivgibbs.rng.RngStream` contract.
Degrees of freedom may be real-valued (>= dimension): the chi-squared
Bartlett diagonals generalize to Gamma((df - i)/2, 2) variates, which is
needed when the inverse-Wishart prior comes from an inverse-gamma with
tiny shape.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
from scipy.special import multigammaln

from .errors import DegreesOfFreedomError, DimensionError
from .linalg import as_spd, cholesky_spd, chol_solve, logdet_spd
from .rng import RngStream


def sample_mvn(mean, cov_chol, rng: RngStream) -> np.ndarray:
    """Draw from N(mean, L L^T) given the lower Cholesky factor L."""
    mean = np.asarray(mean, dtype=float)
    L = np.asarray(cov_chol, dtype=float)
    if L.shape != (mean.size, mean.size):
        raise DimensionError(
            f"cov_chol shape {L.shape} does not match mean of length {mean.size}"
        )
    z = rng.standard_normal(mean.size)
    return mean + L @ z


def _bartlett_lower(df: float, d: int, rng: RngStream) -> np.ndarray:
    """Lower-triangular Bartlett factor A with W = A A^T ~ Wishart(df, I)."""
    A = np.zeros((d, d))
    # Gamma((df - i)/2, 2) reduces to chi-squared(df - i) for integer df.
    diag_sq = rng.gamma(shape=(df - np.arange(d)) / 2.0, scale=2.0)
    np.fill_diagonal(A, np.sqrt(diag_sq))
    idx = np.tril_indices(d, k=-1)
    A[idx] = rng.standard_normal(len(idx[0]))
    return A


def sample_wishart(df: float, scale_chol, rng: RngStream) -> np.ndarray:
    """Wishart(df, S) draw by Bartlett decomposition, S = L L^T given as L."""
    L = np.asarray(scale_chol, dtype=float)
    d = L.shape[0]
    if df < d:
        raise DegreesOfFreedomError(f"Wishart df={df} < dimension {d}")
    A = _bartlett_lower(df, d, rng)
    F = L @ A
    return F @ F.T


def sample_inverse_wishart(df: float, scale, rng: RngStream) -> np.ndarray:
    """Inverse-Wishart(df, S) draw: W^-1 with W ~ Wishart(df, S^-1).

    Implemented with triangular solves on the Cholesky factor of the
    scale; no explicit matrix inverse is formed.
    """
    S = np.asarray(scale, dtype=float)
    d = S.shape[0]
    if df < d:
        raise DegreesOfFreedomError(f"inverse-Wishart df={df} < dimension {d}")
    L = cholesky_spd(S, "inverse-Wishart scale")
    A = _bartlett_lower(df, d, rng)
    # W = L^-T A A^T L^-1 ~ Wishart(df, S^-1), so W^-1 = (L A^-T)(L A^-T)^T.
    G = sla.solve_triangular(A, L.T, lower=True, check_finite=False).T
    out = G @ G.T
    return 0.5 * (out + out.T)


def logpdf_mvn(x, mean, cov) -> float:
    """Log density of N(mean, cov) at x, including normalizing constant."""
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    cov = as_spd(cov, "mvn covariance")
    L = cholesky_spd(cov, "mvn covariance")
    r = x - mean
    alpha = sla.solve_triangular(L, r, lower=True, check_finite=False)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return float(-0.5 * (r.size * np.log(2.0 * np.pi) + logdet + alpha @ alpha))


def logpdf_inv_wishart(S, df: float, scale) -> float:
    """Log density of inverse-Wishart(df, scale) at SPD matrix S."""
    S = as_spd(S, "inverse-Wishart argument")
    scale = as_spd(scale, "inverse-Wishart scale")
    d = S.shape[0]
    if df < d:
        raise DegreesOfFreedomError(f"inverse-Wishart df={df} < dimension {d}")
    Ls = cholesky_spd(S, "inverse-Wishart argument")
    trace_term = float(np.trace(chol_solve(Ls, scale)))
    return float(
        0.5 * df * logdet_spd(scale)
        - 0.5 * df * d * np.log(2.0)
        - multigammaln(0.5 * df, d)
        - 0.5 * (df + d + 1) * logdet_spd(S)
        - 0.5 * trace_term
    )
