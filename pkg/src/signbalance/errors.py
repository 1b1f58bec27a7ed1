class GraphValidationError(ValueError):
    """Malformed graph input. ``line`` is the 1-based offending line/entry."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StatisticUndefined(ValueError):
    """The requested test statistic has no value on this graph."""


class DegenerateApproximation(ValueError):
    """The Gaussian approximation cannot be formed (zero variance, no triangles)."""
