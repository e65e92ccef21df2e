"""Exception hierarchy.

Every error carries a short ``category`` string; the command-line front end
prints it as the first token of its one-line error report.
"""


class TdlBoundsError(Exception):
    category = "error"


class UnsupportedOperationError(TdlBoundsError):
    category = "unsupported"


class CalibrationError(TdlBoundsError, ValueError):
    category = "calibration"


class RangeError(TdlBoundsError, ValueError):
    category = "range"


class DomainError(TdlBoundsError, ValueError):
    category = "domain"


class ContractViolationError(TdlBoundsError, ValueError):
    category = "contract"


class ConditioningError(TdlBoundsError, ArithmeticError):
    """Matrix is singular, indefinite or rank deficient."""

    category = "conditioning"

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class QuadratureAccuracyError(TdlBoundsError, ArithmeticError):
    """Adaptive quadrature stopped before reaching the requested tolerance."""

    category = "accuracy"

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
