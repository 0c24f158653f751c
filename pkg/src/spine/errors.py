"""Exception and warning types shared across the package."""


class SpineError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(SpineError, ValueError):
    """Two objects that must share dimensions do not."""


class DegenerateDesignError(SpineError, ValueError):
    """A regression design matrix is unusable even after pruning."""


class ConvergenceError(SpineError, RuntimeError):
    """An iterative solver exhausted its iteration budget.

    Carries the final residual norm in ``residual``.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class UndecidableEdgeError(SpineError, ValueError):
    """A Monte-Carlo trial budget cannot separate p from the threshold."""


class GenerationError(SpineError, RuntimeError):
    """A synthetic generator failed to hit its target."""


class ParseError(SpineError, ValueError):
    """An input file failed to parse; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class CollinearPredictorWarning(UserWarning):
    """A regression predictor was dropped because it is collinear."""


class PerfectSeparationWarning(UserWarning):
    """A logistic fit shows signs of perfect separation; probabilities clamped."""


class TargetNotReachedWarning(UserWarning):
    """A best-effort optimization stopped short of its target."""


class TrialBudgetWarning(UserWarning):
    """The configured Monte-Carlo trial count is too small for the requested test."""


class DuplicateEdgeWarning(UserWarning):
    """An input edge list repeated a pair; duplicates collapse to one cell."""
