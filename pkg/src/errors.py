"""
Error kinds raised by the calibration library.

Every error is a ValueError so callers that only care about bad input can
catch the builtin; the CLI maps CalibrationError to exit status 1.
"""


class CalibrationError(ValueError):
    """Base class for data and numeric failures."""


class ParameterDomainError(CalibrationError):
    """A distribution parameter lies outside its admissible range."""


class DomainError(CalibrationError):
    """An argument (probability, mapping target, interval) is out of range."""


class MomentExistenceError(CalibrationError):
    """A requested moment or functional does not exist for the shape."""


class InvalidSampleError(CalibrationError):
    """Empty sample or non-positive observations."""


class DegenerateSampleError(CalibrationError):
    """Sample carries no information about the shape (e.g. all values equal)."""


class UndefinedLossError(CalibrationError):
    """Expected intrinsic loss is infinite for the given sample size."""


class EstimatorUndefinedError(CalibrationError):
    """Estimator formula breaks down (division by zero)."""


class EmptyTailError(CalibrationError):
    """No observation exceeds the threshold."""


class OutOfTailError(CalibrationError):
    """Requested quantile lies below the modelling threshold."""


class ChainDiagnosticsError(CalibrationError):
    """MCMC chain failed its diagnostics (e.g. nothing accepted)."""


class InsufficientDrawsError(CalibrationError):
    """Too few retained draws to summarise."""


class ConfigError(CalibrationError):
    """Invalid configuration object."""
