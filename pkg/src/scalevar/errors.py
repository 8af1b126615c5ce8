"""Exception types shared across the package."""


class ScalevarError(Exception):
    """Base class for all package errors."""


class DomainError(ScalevarError):
    """A probe point falls outside a curve's padded domain."""


class AdmissibilityError(ScalevarError):
    """A variation does not satisfy the exponent admissibility condition."""


class IllConditionedFitError(ScalevarError):
    """The asymptotic design matrix is too ill-conditioned to trust."""


class WaveFunctionNodeError(ScalevarError):
    """A wavefunction was probed too close to one of its zeros."""


class ConsistencyError(ScalevarError):
    """An internal algebraic identity failed beyond tolerance."""


class ConfigError(ScalevarError):
    """An experiment configuration is malformed."""
