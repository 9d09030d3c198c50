"""Exception hierarchy shared by all modules."""


class ProcycError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ProcycError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InputError(ProcycError, ValueError):
    """Malformed or too-short input data."""


class NumericError(ProcycError, ArithmeticError):
    """A root-finder or quadrature failed to reach its tolerance.

    ``estimate`` and ``error_bound`` carry the best value reached, when known.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class CapabilityError(ProcycError, NotImplementedError):
    """The requested combination has no closed form; use the generic routes."""


class InsufficientDataError(InputError):
    """Fewer valid observations or pairs than an operation needs."""


class DegenerateCorrelationError(ProcycError, ValueError):
    """A correlation was requested on a column with zero variance."""


class ConfigError(ProcycError, ValueError):
    """Invalid or incomplete run configuration."""
