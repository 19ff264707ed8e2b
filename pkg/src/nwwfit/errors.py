"""Exception hierarchy shared across the package."""


class NwwError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(NwwError, ValueError):
    """A distribution parameter is outside its legal range or non-finite."""


class DomainError(NwwError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class SingularPointError(NwwError, ValueError):
    """Evaluation requested at a point where a density or its derivative diverges."""


class DataSupportError(NwwError, ValueError):
    """An observation lies outside the model support (or at a zero-density point)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DivergenceError(NwwError, ValueError):
    """An integral transform was requested outside its convergence region."""


class OptimizationError(NwwError, RuntimeError):
    """No optimizer start converged; carries per-start diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class EnvelopeError(NwwError, RuntimeError):
    """A rejection-sampling envelope could not be constructed or is unusable."""


class EfficiencyError(NwwError, RuntimeError):
    """Rejection sampling acceptance rate fell below the usable floor."""


class IngestionError(NwwError, ValueError):
    """Input data file could not be read or validated."""


class ConvergenceUnverifiedWarning(UserWarning):
    """A truncated series was evaluated outside its verified convergence region."""
