"""Exception hierarchy shared by the package."""


class CqedStirapError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CqedStirapError, ValueError):
    """A matrix or parameter failed a validation check."""


class NotPSDError(InvalidInputError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class TruncationError(InvalidInputError):
    """The Fock-space truncation is too small for the requested quantity."""


class NestingError(CqedStirapError):
    """The drive frequency lies outside the nesting window."""


class UndefinedAngleError(CqedStirapError, ValueError):
    """The STIRAP mixing angle cannot be evaluated at the requested time."""


class IntegratorDivergedError(CqedStirapError, RuntimeError):
    """Trace drift or positivity loss exceeded the integrator limits."""

    def __init__(self, message, max_trace_drift=None, min_eigenvalue=None):
        super().__init__(message)
        self.max_trace_drift = max_trace_drift
        self.min_eigenvalue = min_eigenvalue


class ConfigError(CqedStirapError, ValueError):
    """A configuration file or sweep specification is malformed."""
