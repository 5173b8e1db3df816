"""Exception hierarchy shared across the package."""


class PhysBenchError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PhysBenchError):
    """Malformed input: bad schema, nonmonotone time, missing annotations."""


class ConfigError(PhysBenchError):
    """Inconsistent configuration values (window sizes, fractions, ...)."""


class NumericsError(PhysBenchError):
    """Non-finite values or diverging numerical state."""


class FitError(PhysBenchError):
    """A geometric fit (e.g. circle fit) is degenerate or underconstrained."""


class InsufficientOscillationError(PhysBenchError):
    """Too few oscillations to estimate a period."""


class TrainingError(NumericsError):
    """Model training diverged; carries loss diagnostics in the message."""


class DegenerateTrajectoryError(ValidationError):
    """Trajectory has no usable variance (should have been gated as still)."""
