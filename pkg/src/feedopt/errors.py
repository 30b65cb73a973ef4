"""Exception types shared across the package."""


class FeedoptError(Exception):
    """Base class for package errors."""


class ConfigError(FeedoptError):
    """Invalid or unreadable experiment configuration."""


class GeometryError(FeedoptError):
    """Degenerate toolpath geometry (e.g. zero tangent)."""


class FbsBuildError(FeedoptError):
    """Filtered-basis compensator could not be built (rank deficiency)."""


class InfeasibleError(FeedoptError):
    """LP has no feasible point.  `family` names the binding constraint family
    when the diagnosis could identify one."""

    def __init__(self, message: str, family: str | None = None):
        super().__init__(message)
        self.family = family


class NumericalError(FeedoptError):
    """Solver reported an unbounded problem or a numerical failure."""


class DegenerateStopError(FeedoptError):
    """Path-domain solution stops (q=0) on an interior interval, so the
    traversal time is unbounded."""


class OperatorSizeError(FeedoptError):
    """Dense operator materialization refused: horizon exceeds the memory cap."""
