"""
Exception hierarchy for the kernsel package.

Every error derives from ValueError so callers that only guard against bad
input keep working.
"""


class KernselError(ValueError):
    """Base class for all kernsel errors."""


class InputDomainError(KernselError):
    """An evaluation point lies outside the kernel domain or is not finite."""


class ConfigurationError(KernselError):
    """Invalid family, penalty, grid or experiment settings."""


class RuleUnavailableError(ConfigurationError):
    """A theoretical penalty was requested for a kernel without constant chi/Theta."""


class UnsupportedDensityError(ConfigurationError):
    """The density cannot be used for the requested computation."""


class DataError(KernselError):
    """Malformed, empty or non-finite sample data."""

    def __init__(self, message: str, line_number: int = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class QuadratureError(KernselError):
    """Adaptive quadrature did not reach the requested tolerance."""
