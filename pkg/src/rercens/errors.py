"""Exception types shared across the library."""


class EstimationUndefinedError(RuntimeError):
    """Raised when an estimator's denominator vanishes at an evaluation point."""

    def __init__(self, x, message=None):
        self.x = x
        super().__init__(message or f"estimator undefined at x={x}")


class SelectionFailedError(RuntimeError):
    """Raised when every bandwidth on the grid yields an undefined CV criterion."""


class GenerationRejectedError(RuntimeError):
    """Raised when a simulated lifetime violates strict positivity."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"generated lifetime t[{index}]={value!r} is not strictly positive")


class CalibrationFailedError(RuntimeError):
    """Raised when the censoring-rate target is unreachable within the bracket."""

    def __init__(self, target, achieved_lo, achieved_hi):
        self.target = target
        self.achieved_range = (achieved_lo, achieved_hi)
        super().__init__(
            f"target censoring rate {target} outside achievable range "
            f"[{achieved_hi:.4f}, {achieved_lo:.4f}]"
        )


class OracleUnreliableError(RuntimeError):
    """Raised when the Monte Carlo oracle rejects too many nonpositive draws."""


class SlopeUndefinedError(RuntimeError):
    """Raised when all rate-study medians coincide and no slope can be fitted."""


class ConfigError(ValueError):
    """Configuration document failed validation; carries the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
