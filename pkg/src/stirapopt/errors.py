"""Exception hierarchy."""


class StirapError(Exception):
    """Base class for errors raised by this package."""


class DomainError(StirapError, ValueError):
    """An argument lies outside the domain of the operation."""


class ScheduleError(DomainError):
    """An angle schedule violates its structural contract."""


class ModelError(StirapError, ValueError):
    """The requested model cannot run with the given parameters."""


class NumericalBlowupError(StirapError, ArithmeticError):
    """The integrated state became non-finite."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time
