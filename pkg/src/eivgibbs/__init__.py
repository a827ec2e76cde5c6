"""Gibbs sampling for Bayesian error-in-variables regression.

Library surface: exact conditional updates and the deterministic-scan
Gibbs kernel for the general measurement-error regression posterior and
its four specializations, drift-function numerics, MCMC diagnostics,
and a reproducible experiment harness (see the ``eiv-gibbs`` CLI).
"""

from .diagnostics import (
    DiagnosticsReport,
    autocorrelation,
    batch_means_cov,
    diagnose,
    mess,
    se_eigen_extremes,
)
from .distributions import (
    logpdf_inv_wishart,
    logpdf_mvn,
    sample_inverse_wishart,
    sample_mvn,
    sample_wishart,
)
from .errors import (
    ConfigError,
    DegreesOfFreedomError,
    DimensionError,
    EivError,
    RankDeficiencyError,
    SpdError,
)
from .geweke import GewekeReport, geweke_validate
from .linalg import symmetric_sqrt
from .model import (
    ChainState,
    ConditionalParams,
    GeneralDensity,
    ModelConfig,
    build_general,
    coef_conditional,
    drift_bound,
    drift_value,
    latent_conditional,
    log_unnormalized_density,
    paper_to_canonical_indices,
    proof_identities_check,
    sigma_conditional,
)
from .rng import RngStream
from .sampler import (
    ChainOutput,
    RunSpec,
    gibbs_step,
    init_default,
    init_overdispersed,
    run_chain,
    run_replicates,
    simulate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "ChainOutput",
    "ChainState",
    "ConditionalParams",
    "ConfigError",
    "DegreesOfFreedomError",
    "DiagnosticsReport",
    "DimensionError",
    "EivError",
    "GeneralDensity",
    "GewekeReport",
    "ModelConfig",
    "RankDeficiencyError",
    "RngStream",
    "RunSpec",
    "SpdError",
    "autocorrelation",
    "batch_means_cov",
    "build_general",
    "coef_conditional",
    "diagnose",
    "drift_bound",
    "drift_value",
    "geweke_validate",
    "gibbs_step",
    "init_default",
    "init_overdispersed",
    "latent_conditional",
    "log_unnormalized_density",
    "logpdf_inv_wishart",
    "logpdf_mvn",
    "mess",
    "paper_to_canonical_indices",
    "proof_identities_check",
    "run_chain",
    "run_replicates",
    "sample_inverse_wishart",
    "sample_mvn",
    "sample_wishart",
    "se_eigen_extremes",
    "sigma_conditional",
    "simulate_dataset",
    "symmetric_sqrt",
]
