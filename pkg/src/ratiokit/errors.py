"""Exception types shared across the package."""


class RatioKitError(Exception):
    """Base class for all ratiokit errors."""


class DomainError(RatioKitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(RatioKitError, ValueError):
    """Malformed input data (sequences, files, configuration)."""


class NonConvergenceError(RatioKitError, RuntimeError):
    """A numeric routine exhausted its budget before reaching tolerance.

    Carries the best estimate produced so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
