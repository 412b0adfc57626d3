"""Exception hierarchy shared across the package."""


class NccError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NccError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class InvariantError(NccError):
    """An internal invariant was violated (indicates a bug or corrupt state)."""


class InsufficientDataError(DomainError):
    """Not enough observations to carry out the requested computation."""


class SingularDesignError(NccError):
    """Regressor matrix is rank deficient.

    ``columns`` names the offending (collinear or degenerate) columns.
    """

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class ConvergenceError(NccError):
    """Iterative solver failed to reach its tolerance within the iteration cap.

    ``residual_history`` holds the sup-norm residual of every sweep performed.
    """

    def __init__(self, message, residual_history=()):
        super().__init__(message)
        self.residual_history = list(residual_history)


class NumericalError(NccError):
    """A numerical evaluation produced a non-finite value."""


class ConfigError(NccError):
    """Configuration file or override is invalid."""
