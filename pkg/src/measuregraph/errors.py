"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: validation errors exit with 2,
numerical failures with 3 and exhausted budgets with 4.
"""


class MeasureGraphError(Exception):
    """Base class for all package errors."""


class ValidationError(MeasureGraphError, ValueError):
    """Bad parameters, malformed specs, or inputs outside a declared domain."""


class InvalidDistributionError(ValidationError):
    """Counting or label distribution parameters outside their allowed range."""


class DomainError(ValidationError):
    """Special function called outside its domain (e.g. zeta at s <= 1)."""


class InfeasibleError(ValidationError):
    """A degree sequence or parameter vector that admits no realization."""


class NumericalError(MeasureGraphError, ArithmeticError):
    """A numerical routine failed to converge or stalled."""


class BudgetError(MeasureGraphError):
    """Requested work exceeds a configured enumeration or time budget."""


class TruncationWarning(UserWarning):
    """A truncated sum or series left more mass behind than the tolerance allows."""
