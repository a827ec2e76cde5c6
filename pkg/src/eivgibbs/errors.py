"""Exception types shared across the package."""


class EivError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(EivError, ValueError):
    """Inputs have mutually inconsistent shapes."""


class SpdError(EivError, ValueError):
    """A matrix that must be symmetric positive definite is not.

    The message names the offending matrix; there is no automatic
    jitter, since every matrix assembled by this package should be SPD
    by construction and a failure indicates a modeling bug.
    """


class DegreesOfFreedomError(EivError, ValueError):
    """Wishart/inverse-Wishart degrees of freedom below the dimension."""


class ConfigError(EivError, ValueError):
    """Invalid experiment configuration or dataset file."""


class RankDeficiencyError(EivError, ValueError):
    """A chain covariance needed at full rank is (numerically) singular."""
