"""Exception types raised by hjreach."""


class HJReachError(Exception):
    """Base class for every error raised by this package."""


class GridError(HJReachError, ValueError):
    """Invalid grid construction or a field/grid mismatch."""


class DomainError(HJReachError, ValueError):
    """A query point or index lies outside the grid."""


class DynamicsError(HJReachError, ValueError):
    """Bad system parameters, wrong vector sizes, or inputs out of range."""


class DivergenceError(HJReachError, FloatingPointError):
    """The solver produced a non-finite value."""

    def __init__(self, message, state=None, step=None, dt=None):
        super().__init__(message)
        self.state = state
        self.step = step
        self.dt = dt


class ConfigError(HJReachError, ValueError):
    """A problem configuration failed to parse or validate."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class FieldFormatError(HJReachError, ValueError):
    """A field file is malformed, truncated, or of an unsupported version."""
