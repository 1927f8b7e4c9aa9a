"""Exception types shared across the package."""


class ThpError(Exception):
    """Base class for all package errors."""


class ParameterError(ThpError, ValueError):
    """Invalid parameters at construction time."""


class DomainError(ThpError, ValueError):
    """Evaluation point outside an operation's domain."""


class RangeError(ThpError, ValueError):
    """Argument outside the supported numerical range (use the transform-inversion path)."""


class SeriesError(ThpError, ArithmeticError):
    """A series evaluation could not reach the requested accuracy."""


class InversionError(ThpError, RuntimeError):
    """Numerical Laplace inversion failed; carries the offending abscissa when known."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class IntegrationError(ThpError, RuntimeError):
    """Adaptive quadrature did not converge to the requested tolerance."""


class ResourceError(ThpError, RuntimeError):
    """A simulation exceeded its step or event budget."""


class StepSizeError(ThpError, ValueError):
    """Rejection acceptance rate too low; the caller must shrink the time step."""


class StationarityError(ThpError, ValueError):
    """Operation requires kappa - eta*mu > 0."""
