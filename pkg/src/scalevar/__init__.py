"""Scale-derivative calculus on Hoelder curves with variational checks."""

__version__ = "0.1.0"

from . import asymptotics, curves, qcalc, schrodinger, variational
from .errors import (
    AdmissibilityError,
    ConfigError,
    ConsistencyError,
    DomainError,
    IllConditionedFitError,
    ScalevarError,
    WaveFunctionNodeError,
)

__all__ = [
    "__version__",
    "asymptotics",
    "curves",
    "qcalc",
    "schrodinger",
    "variational",
    "AdmissibilityError",
    "ConfigError",
    "ConsistencyError",
    "DomainError",
    "IllConditionedFitError",
    "ScalevarError",
    "WaveFunctionNodeError",
]
