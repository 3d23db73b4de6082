"""
Exception hierarchy shared by every biharmonic app.

Validation problems (bad parameters, points outside a domain, unsupported
configurations) are kept apart from numerical failures so the management
commands can map them to distinct exit statuses.
"""
from typing import Optional, Tuple


class BiharmonicError(Exception):
    """Base class for all errors raised by the library."""


class InvalidParameterError(BiharmonicError, ValueError):
    """A parameter is outside its admissible range."""


class DomainError(BiharmonicError, ValueError):
    """A coordinate is at or beyond a singular point of a profile."""


class UnsupportedError(BiharmonicError):
    """The requested operation is not defined for this configuration."""


class ImproperIntegralError(BiharmonicError):
    """The quadrature interval touches a non-integrable endpoint."""


class NumericalFailure(BiharmonicError):
    """Base class for failures of an iterative or integrating routine."""


class DivergenceError(NumericalFailure):
    def __init__(self, message: str, last_node: Optional[Tuple[float, ...]] = None):
        super().__init__(message)
        self.last_node = last_node


class SingularityError(NumericalFailure):
    """The leading coefficient of the ODE vanishes on the integration range."""


class NoConvergenceError(NumericalFailure):
    def __init__(
        self,
        message: str,
        best_residual: float = float("inf"),
        best_seed: Optional[object] = None,
    ):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_seed = best_seed


class PrecisionWarning(UserWarning):
    """A result was produced but may not meet the requested accuracy."""
