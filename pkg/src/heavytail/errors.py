"""Exception types raised across the package.

Every error carries a stable ``code`` string so the CLI can map failures to
exit statuses and messages without string matching.
"""


class HeavyTailError(Exception):
    code = "ERROR"


class NonConvergentError(HeavyTailError):
    """A series could be certified neither convergent nor divergent."""

    code = "NONCONVERGENT"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoConvergenceError(HeavyTailError):
    """Truncation could not meet the requested tolerance.

    ``estimate`` holds the bracket that was achieved before giving up.
    """

    code = "NO_CONVERGENCE"

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class UnsupportedError(HeavyTailError):
    code = "UNSUPPORTED"


class BudgetExceededError(HeavyTailError):
    code = "BUDGET_EXCEEDED"


class DegeneratePivotError(HeavyTailError):
    code = "DEGENERATE_PIVOT"


class UnstableError(HeavyTailError):
    """Too few Monte Carlo hits to form a ratio."""

    code = "UNSTABLE"


class DivisionDomainError(HeavyTailError):
    code = "DIVISION_DOMAIN"


class ZeroTailError(HeavyTailError):
    code = "ZERO_TAIL"


class PivotNotInSupportError(HeavyTailError):
    code = "PIVOT_NOT_IN_SUPPORT"


class ConfigError(HeavyTailError):
    """Malformed experiment configuration; ``field`` is a dotted path."""

    code = "CONFIG"

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
