"""Exception types shared across the package."""


class FppError(Exception):
    """Base class for all package errors."""


class AccuracyError(FppError, ArithmeticError):
    """A numerical routine could not reach its requested accuracy.

    ``value`` holds the best partial result and ``bound`` an estimate of
    its absolute error, when available.
    """

    def __init__(self, message, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound


class DataError(FppError, ValueError):
    """Input data violates a precondition (bad value, malformed file)."""

    def __init__(self, message, index=None, line=None):
        super().__init__(message)
        self.index = index
        self.line = line


class SampleSizeError(DataError):
    """Too few observations for the requested statistic."""


class EstimationError(FppError, ValueError):
    """Estimator diagnostics failed, e.g. a negative variance radicand."""
