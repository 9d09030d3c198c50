"""Pro-cyclicality of historically estimated risk measures.

Estimators for VaR, expected shortfall and expectiles, absolute centred
sample moments, asymptotic correlations for iid Gaussian and Student-t laws,
GARCH(1,1) simulation and residuals, and the sample pro-cyclicality statistic.
"""
from .dist import DistributionModel, gaussian, kappa, kappa_inverse, student_t
from .errors import (CapabilityError, ConfigError, DegenerateCorrelationError, DomainError,
                     InputError, InsufficientDataError, NumericError, ProcycError)
from .estimators import RiskMeasureSpec
from .kernels import BACKEND
from .processes import GarchParams, SimulationPlan

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CapabilityError", "ConfigError", "DegenerateCorrelationError", "DistributionModel",
    "DomainError", "GarchParams", "InputError", "InsufficientDataError", "NumericError",
    "ProcycError", "RiskMeasureSpec", "SimulationPlan", "gaussian", "kappa", "kappa_inverse",
    "student_t", "__version__",
]
