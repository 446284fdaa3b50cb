"""Exception hierarchy shared by the solvers, the fitter and the CLI."""


class RefreshAllocError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RefreshAllocError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(DomainError):
    """No assignment satisfies the power budget under the given bounds."""

    def __init__(self, message, min_power=None):
        super().__init__(message)
        self.min_power = min_power


class UnreachableFidelityError(DomainError):
    """A target MSE below the all-minimum-interval MSE was requested."""

    def __init__(self, message, min_mse=None):
        super().__init__(message)
        self.min_mse = min_mse


class SizeError(DomainError):
    """An instance is too large for exhaustive enumeration."""


class InsufficientDataError(DomainError):
    pass


class NonPhysicalFitError(DomainError):
    """The fitted BER slope is not positive."""


class NumericError(RefreshAllocError, ArithmeticError):
    """An iterative method failed to bracket or converge."""


class ModelValidityWarning(UserWarning):
    """A BER above 0.5 was produced; the exponential law is not trusted there."""
