"""Estimation-reliability diagnostics for stored chains.

Batch-means long-run covariance, extreme eigenvalues of the standard
error matrix square root, multivariate effective sample size, and
per-coordinate autocorrelations. All functions operate on the stored
(post burn-in, thinned) chain exactly as given.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, RankDeficiencyError
from .linalg import symmetric_sqrt

#: condition number above which determinants fall back to pseudo-determinants
COND_LIMIT = 1e12


def batch_means_cov(chain: np.ndarray) -> tuple[np.ndarray, int]:
    """Non-overlapping batch-means estimate of the long-run covariance.

    Uses b = floor(sqrt(T)) batches of consecutive rows, a = floor(T/b)
    of them, discarding the tail; returns (b/(a-1)) sum_k (ybar_k -
    ybar)(ybar_k - ybar)^T and the batch size b.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 1:
        chain = chain[:, None]
    if chain.ndim != 2:
        raise DimensionError("chain must be a T x d matrix")
    T = chain.shape[0]
    if T < 4:
        raise DimensionError(f"need T >= 4 rows, got {T}")
    b = int(np.floor(np.sqrt(T)))
    a = T // b
    used = chain[: a * b]
    batches = used.reshape(a, b, -1).mean(axis=1)
    dev = batches - used.mean(axis=0)
    cov = (b / (a - 1.0)) * dev.T @ dev
    return 0.5 * (cov + cov.T), b


def _logdet_with_fallback(S: np.ndarray, what: str, labels=None) -> tuple[float, bool]:
    """Cholesky log-determinant with a flagged pseudo-determinant fallback."""
    w = np.linalg.eigvalsh(S)
    if w[0] <= 0 or w[-1] / max(w[0], 1e-300) > COND_LIMIT:
        tol = max(w[-1], 0.0) * 1e-12
        kept = w[w > tol]
        if kept.size == 0:
            bad = _zero_variance_coords(S, labels)
            raise RankDeficiencyError(f"{what} is singular; offending coordinates: {bad}")
        warnings.warn(
            f"{what} is near-singular (cond > {COND_LIMIT:.0e}); "
            "using pseudo-determinant",
            RuntimeWarning,
        )
        return float(np.sum(np.log(kept))), True
    return float(np.sum(np.log(w))), False


def _zero_variance_coords(S: np.ndarray, labels=None) -> list:
    diag = np.diag(S)
    bad = np.where(diag <= 1e-300 * max(diag.max(), 1.0))[0]
    if bad.size == 0:
        bad = np.array([int(np.argmin(diag))])
    if labels is not None:
        return [labels[i] for i in bad]
    return bad.tolist()


def mess(chain: np.ndarray, labels=None) -> float:
    """Multivariate effective sample size T (det Lambda / det SigmaHat)^(1/d).

    Lambda is the sample covariance and SigmaHat the batch-means
    long-run covariance estimate.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 1:
        chain = chain[:, None]
    T, d = chain.shape
    const = np.all(chain == chain[0], axis=0)
    if np.any(const):
        bad = np.where(const)[0]
        names = [labels[i] for i in bad] if labels is not None else bad.tolist()
        raise RankDeficiencyError(
            f"chain has exactly constant coordinates: {names}"
        )
    lam = np.cov(chain, rowvar=False).reshape(d, d)
    bm, _ = batch_means_cov(chain)
    ld_lam, _ = _logdet_with_fallback(lam, "sample covariance", labels)
    ld_bm, _ = _logdet_with_fallback(bm, "batch-means covariance", labels)
    return float(T * np.exp((ld_lam - ld_bm) / d))


def autocorrelation(chain: np.ndarray, max_lag: int) -> np.ndarray:
    """Per-coordinate sample autocorrelations at lags 0..max_lag.

    Denominators use the full-sample variance; lag 0 is exactly 1.
    Zero-variance coordinates get NaN at every positive lag.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 1:
        chain = chain[:, None]
    T, d = chain.shape
    if max_lag >= T:
        raise DimensionError(f"max_lag {max_lag} must be < T = {T}")
    centered = chain - chain.mean(axis=0)
    denom = np.sum(centered * centered, axis=0)
    out = np.empty((d, max_lag + 1))
    out[:, 0] = 1.0
    zero = denom <= 0.0
    for lag in range(1, max_lag + 1):
        num = np.sum(centered[lag:] * centered[:-lag], axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            out[:, lag] = num / denom
    out[zero, 1:] = np.nan
    return out


def se_eigen_extremes(bm_cov: np.ndarray) -> tuple[float, float]:
    """Extreme eigenvalues of the symmetric square root of bm_cov."""
    root = symmetric_sqrt(bm_cov, "batch-means covariance")
    w = np.linalg.eigvalsh(root)
    return float(w[0]), float(w[-1])


@dataclass
class DiagnosticsReport:
    bm_cov: np.ndarray
    batch_size: int
    se_sqrt_eig_min: float
    se_sqrt_eig_max: float
    mess: float
    mess_exceeds_T: bool
    acf: np.ndarray  # (d, max_lag + 1)
    sample_cov: np.ndarray
    d: int
    T: int
    labels: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "T": self.T,
            "batch_size": self.batch_size,
            "labels": self.labels,
            "bm_cov": self.bm_cov.tolist(),
            "sample_cov": self.sample_cov.tolist(),
            "se_sqrt_eig_min": self.se_sqrt_eig_min,
            "se_sqrt_eig_max": self.se_sqrt_eig_max,
            "mess": self.mess,
            "mess_exceeds_T": self.mess_exceeds_T,
            "acf": np.where(np.isnan(self.acf), None, self.acf).tolist(),
        }


def diagnose(chain: np.ndarray, max_lag: int = 20, labels=None) -> DiagnosticsReport:
    """Full diagnostics bundle for a stored chain."""
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 1:
        chain = chain[:, None]
    T, d = chain.shape
    bm, b = batch_means_cov(chain)
    lo, hi = se_eigen_extremes(bm)
    m = mess(chain, labels)
    return DiagnosticsReport(
        bm_cov=bm,
        batch_size=b,
        se_sqrt_eig_min=lo,
        se_sqrt_eig_max=hi,
        mess=m,
        mess_exceeds_T=m > T,
        acf=autocorrelation(chain, min(max_lag, T - 1)),
        sample_cov=np.cov(chain, rowvar=False).reshape(d, d),
        d=d,
        T=T,
        labels=list(labels) if labels is not None else [],
    )
