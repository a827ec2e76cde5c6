"""Joint-distribution correctness test for the Gibbs implementation.

Compares two samplers of the same joint law over (parameters, latents,
data): marginal-conditional (draw parameters and latents from the
prior, then data from the model) against successive-conditional
(alternate one Gibbs sweep with re-drawing the data given the current
parameters). Under a correct implementation both produce the same joint
distribution, so two-sample z-scores of any test function are standard
normal; a coding bug in a conditional shows up as a large |z|.

Data regeneration per variant keeps every factor proper: Berkson
variants hold X fixed as covariates (the flat latent prior is proper
only conditionally on X) and regenerate Y; classical variants
regenerate both X | A and Y; the -xy variants regenerate Y from the
latent responses carried in the coefficient block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import sample_inverse_wishart
from .errors import ConfigError, SpdError
from .linalg import chol_inverse, chol_solve, cholesky_spd, logdet_spd
from .model import (
    ChainState,
    GeneralDensity,
    ModelConfig,
    build_general,
    coef_to_canonical,
    drift_value,
)
from .rng import RngStream
from . import sampler as _sampler


@dataclass
class GewekeReport:
    names: list[str]
    z_scores: np.ndarray
    mc_means: np.ndarray
    sc_means: np.ndarray
    iterations: int
    diverged: bool = False  # successive chain left the support numerically

    def fraction_within(self, limit: float) -> float:
        return float(np.mean(np.abs(self.z_scores) <= limit))

    @property
    def max_abs_z(self) -> float:
        return float(np.abs(self.z_scores).max())

    def passed(self, limit: float = 4.0, coverage: float = 0.95) -> bool:
        return self.fraction_within(limit) >= coverage

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "names": self.names,
            "z_scores": self.z_scores.tolist(),
            "max_abs_z": self.max_abs_z,
            "fraction_within_4": self.fraction_within(4.0),
        }


def _prior_state(config: ModelConfig, g: GeneralDensity, rng: RngStream) -> ChainState:
    """Draw (A, gamma, Sigma) from the variant's prior factorization."""
    n, m, p, q = config.dims
    Sigma = sample_inverse_wishart(config.a0, config.B0, rng)
    coef = config.j0 + cholesky_spd(config.J0, "J0") @ rng.standard_normal(config.j0.size)
    coef = coef_to_canonical(coef, m, q, p)
    W = coef.reshape(q + p, m, order="F")
    Theta, B = W[:q], W[q:]
    A = np.empty((n, p))
    if config.variant.startswith("berkson"):
        loc, cov = config.X, config.V
    else:
        loc, cov = config.k, config.K
    for i in range(n):
        A[i] = loc[i] + cholesky_spd(cov[i], "latent prior cov") @ rng.standard_normal(p)
    Sig_chol = cholesky_spd(Sigma, "Sigma")
    if config.variant.endswith("xy"):
        Vlat = config.Z @ Theta + A @ B + rng.standard_normal((n, m)) @ Sig_chol.T
        gamma = np.vstack([Vlat, Theta, B]).reshape(-1, order="F")
    else:
        gamma = coef
    return ChainState(A=A, gamma=gamma, Sigma=Sigma)


def _regen_data(config: ModelConfig, state: ChainState, g: GeneralDensity,
                rng: RngStream) -> None:
    """Redraw the observed data given the current state, in place on config."""
    n, m, p, q = config.dims
    W = state.gamma.reshape(g.k, m, order="F")
    if config.variant.endswith("xy"):
        Vlat = W[:n]
        for i in range(n):
            Uc = cholesky_spd(config.U[i], "U")
            config.Y[i] = Vlat[i] + Uc @ rng.standard_normal(m)
    else:
        Theta, B = W[:q], W[q:]
        Sig_chol = cholesky_spd(state.Sigma, "Sigma")
        mean = config.Z @ Theta + state.A @ B
        config.Y[:] = mean + rng.standard_normal((n, m)) @ Sig_chol.T
    if config.variant.startswith("classical"):
        for i in range(n):
            Vc = cholesky_spd(config.V[i], "V")
            config.X[i] = state.A[i] + Vc @ rng.standard_normal(p)


def _draw_data_from_model(config: ModelConfig, state: ChainState,
                          g: GeneralDensity, rng: RngStream) -> None:
    """Marginal-conditional data draw: same mechanism as regeneration."""
    _regen_data(config, state, g, rng)


def _apply_data(g: GeneralDensity, config: ModelConfig,
                shrink: tuple | None) -> None:
    """Refresh the data-dependent pieces of g after config.Y/X changed.

    Touches only R, c0, d and their cached derived quantities; the fixed
    SPD structure (C0, D, B0) never changes during the test.
    """
    n, m, p, q = config.dims
    if g.nu_rows:
        for i in range(n):
            g.c0[i + g.k * np.arange(m)] = config.Y[i]
        g.__dict__["C0_inv_c0"] = chol_solve(g.C0_chol, g.c0)
    else:
        g.R[:] = config.Y
    if shrink is not None:
        Vinv, Kinv = shrink
        rhs = np.einsum("ijk,ik->ij", Vinv, config.X) + np.einsum(
            "ijk,ik->ij", Kinv, config.k
        )
        g.d[:] = np.einsum("ijk,ik->ij", g.D, rhs)
        g.__dict__["D_inv_d"] = np.einsum("ijk,ik->ij", g.D_inv, g.d)
    elif not g.nu_rows:
        g.d[:] = config.X
        g.__dict__["D_inv_d"] = np.einsum("ijk,ik->ij", g.D_inv, g.d)
    else:
        g.d[:] = config.X
        g.__dict__["D_inv_d"] = np.einsum("ijk,ik->ij", g.D_inv, g.d)


def _test_functions(state: ChainState, g: GeneralDensity) -> np.ndarray:
    return np.concatenate(
        [state.gamma,
         [logdet_spd(state.Sigma, "Sigma"), drift_value(state, g)]]
    )


def _bm_se(x: np.ndarray) -> float:
    """Batch-means standard error of the mean of a univariate series."""
    T = x.size
    b = int(np.sqrt(T))
    a = T // b
    batches = x[: a * b].reshape(a, b).mean(axis=1)
    var = b * np.var(batches, ddof=1)
    return float(np.sqrt(var / T))


def geweke_validate(
    config: ModelConfig,
    iterations: int = 10_000,
    rng: RngStream | None = None,
    regenerate_data: bool = True,
) -> GewekeReport:
    """Run the two-sampler comparison and report per-test-function z-scores.

    With regenerate_data=False the successive side degenerates to fresh
    prior draws (a prior-vs-prior comparison; all z should be near 0),
    which is useful for calibrating the harness itself.
    """
    if config.variant == "general":
        raise ConfigError(
            "geweke_validate needs a concrete variant; the 'general' density "
            "has no generative data factorization to test against"
        )
    rng = rng if rng is not None else RngStream(0)
    config = ModelConfig(
        variant=config.variant,
        Y=config.Y.copy(), X=config.X.copy(), Z=config.Z.copy(),
        V=config.V, a0=config.a0, B0=config.B0, j0=config.j0, J0=config.J0,
        U=config.U, k=config.k, K=config.K,
    )
    g = build_general(config)
    shrink = None
    if config.variant.startswith("classical"):
        shrink = (
            np.array([chol_inverse(cholesky_spd(Vi, "V")) for Vi in config.V]),
            np.array([chol_inverse(cholesky_spd(Ki, "K")) for Ki in config.K]),
        )

    names = g.coef_labels() + ["logdetSigma", "driftV"]
    dim = len(names)
    mc = np.empty((iterations, dim))
    rng_mc = rng.child("marginal")
    for t in range(iterations):
        state = _prior_state(config, g, rng_mc)
        _draw_data_from_model(config, state, g, rng_mc)
        _apply_data(g, config, shrink)
        mc[t] = _test_functions(state, g)

    sc = np.empty((iterations, dim))
    rng_sc = rng.child("successive")
    state = _prior_state(config, g, rng_sc)
    _draw_data_from_model(config, state, g, rng_sc)
    _apply_data(g, config, shrink)
    diverged = False
    kept = iterations
    # overflow inside the loop just means the chain has left the support,
    # which the divergence handling below turns into a report
    err_state = np.errstate(over="ignore", invalid="ignore")
    err_state.__enter__()
    for t in range(iterations):
        try:
            if regenerate_data:
                state = _sampler.gibbs_step(state, g, rng_sc)
                _regen_data(config, state, g, rng_sc)
                _apply_data(g, config, shrink)
            else:
                state = _prior_state(config, g, rng_sc)
                _draw_data_from_model(config, state, g, rng_sc)
                _apply_data(g, config, shrink)
            sc[t] = _test_functions(state, g)
        except (SpdError, np.linalg.LinAlgError, FloatingPointError):
            diverged = True
        if not diverged and not np.all(np.isfinite(sc[t])):
            diverged = True
        if diverged:
            # A broken conditional typically drives the joint sampler out
            # of the support; keep what we have and let the z-scores blow up.
            kept = max(t, 16)
            sc = sc[:kept]
            if t < 16:
                sc[t:] = sc[max(t - 1, 0)]
            break

    z = np.empty(dim)
    for j in range(dim):
        se_mc = float(np.std(mc[:, j], ddof=1) / np.sqrt(iterations))
        se_sc = _bm_se(sc[:, j])
        denom = np.sqrt(se_mc**2 + se_sc**2)
        diff = mc[:, j].mean() - sc[:, j].mean()
        if denom > 0:
            z[j] = diff / denom
        else:
            z[j] = 0.0 if diff == 0 else np.inf
    err_state.__exit__(None, None, None)
    return GewekeReport(
        names=names,
        z_scores=z,
        mc_means=mc.mean(axis=0),
        sc_means=sc.mean(axis=0),
        iterations=iterations,
        diverged=diverged,
    )
