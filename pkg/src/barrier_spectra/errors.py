"""Exception hierarchy shared across the package."""


class BarrierSpectraError(Exception):
    """Base class for all package errors."""


class ValidationError(BarrierSpectraError, ValueError):
    """Invalid construction parameters; ``param`` names the culprit."""

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class DomainError(BarrierSpectraError, ValueError):
    pass


class PreconditionError(BarrierSpectraError, ValueError):
    pass


class DivergenceError(BarrierSpectraError, ValueError):
    pass


class StepSizeUnderflow(BarrierSpectraError, RuntimeError):
    def __init__(self, message, x_reached):
        super().__init__(message)
        self.x_reached = x_reached


class SingularInputError(BarrierSpectraError, ValueError):
    pass


class BoundaryZeroError(BarrierSpectraError, RuntimeError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class NonIntegerWindingError(BarrierSpectraError, RuntimeError):
    def __init__(self, message, winding=None):
        super().__init__(message)
        self.winding = winding


class BudgetExceededError(BarrierSpectraError, RuntimeError):
    """Subdivision budget exhausted; ``partial`` holds what was found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConditionViolated(BarrierSpectraError, ValueError):
    pass
