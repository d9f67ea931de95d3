class GemError(Exception):
    """Base class for every error raised by this package."""


class DataFormatError(GemError, ValueError):
    pass


class FieldMapError(GemError, ValueError):
    pass


class GraphError(GemError, ValueError):
    pass


class CheckpointError(GemError, ValueError):
    pass


class ConfigError(GemError, ValueError):
    pass


class DivergenceError(GemError, ArithmeticError):
    """Training loss became NaN or infinite."""
