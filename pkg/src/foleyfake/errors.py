"""Exception hierarchy shared by all foleyfake modules."""


class DetectorError(Exception):
    """Base class for all foleyfake errors."""


class FormatError(DetectorError):
    """Malformed container or checkpoint: bad magic, unknown version,
    heterogeneous embedding dimensionality."""


class TruncationError(DetectorError):
    """Byte stream ended before the declared payload was complete."""


class ValidationError(DetectorError):
    """Data violates a documented invariant (duplicate clip ids,
    non-finite values, inconsistent labels, empty samples, ...)."""


class ConfigError(DetectorError):
    """Invalid configuration value or missing input path."""


class ShapeError(DetectorError):
    """Array shape does not match what the model or operation expects."""


class StateError(DetectorError):
    """Operation invoked with stale or mismatched state, e.g. a backward
    pass fed a cache produced by a different model or in eval mode."""


class NumericError(DetectorError):
    """Non-finite value encountered where finite arithmetic is required."""


class CorrelationError(DetectorError):
    """Correlation is undefined for the given inputs (zero variance)."""
