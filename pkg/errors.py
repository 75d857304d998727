from typing import List, Optional


class HelenaError(Exception):
    pass


class DimensionError(HelenaError, ValueError):
    pass


class ConfigurationError(HelenaError, ValueError):
    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class NumericError(HelenaError, ArithmeticError):
    pass


class FormatError(HelenaError, ValueError):
    def __init__(self, message: str, entry: Optional[str] = None):
        super().__init__(message)
        self.entry = entry


class ConsistencyError(HelenaError):
    pass


class TrainingError(HelenaError):
    """Training diverged; ``history`` holds every epoch that finished with finite losses."""

    def __init__(self, message: str, history: Optional[List] = None):
        super().__init__(message)
        self.history = history if history is not None else []
