"""Exception hierarchy shared across the package."""


class FiberTrapError(Exception):
    """Base class for all package errors."""


class DomainError(FiberTrapError, ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(FiberTrapError, RuntimeError):
    """An iterative or adaptive procedure did not reach its tolerance.

    ``estimate`` and ``error`` carry the best result obtained.
    """

    def __init__(self, message, estimate=None, error=None, diagnostics=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.diagnostics = diagnostics or {}


class EvaluationError(FiberTrapError, ArithmeticError):
    """A function returned a non-finite value at ``abscissa``."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class DegenerateModeError(FiberTrapError):
    """The dispersion matrix has no isolated null direction."""


class NotATrapError(FiberTrapError):
    """The potential has no interior minimum with positive curvature."""
