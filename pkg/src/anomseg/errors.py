"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for every error this package raises deliberately."""


class FormatError(EngineError):
    """An interchange file is malformed or uses an unsupported layout."""


class ValidationError(EngineError):
    """Tensor contents violate an invariant (non-finite values, bad labels, ...)."""


class ShapeError(EngineError):
    """Two tensors that must agree in shape do not."""

    def __init__(self, message: str, *shapes):
        super().__init__(message)
        self.shapes = tuple(shapes)


class ConfigError(EngineError):
    """A configuration value is unknown, out of range, or inconsistent."""


class DegenerateError(EngineError):
    """Metrics requested on data with no positives or no negatives."""


class IoError(EngineError):
    """A filesystem read or write failed."""
