"""Exception types raised by the grushin package."""


class GrushinError(Exception):
    """Base class for all package errors."""


class SingularPoint(GrushinError, ArithmeticError):
    """Raised when a quantity is requested on the singular set (x = 0 or g1 = 0)."""


class EvaluationOutsideDomain(GrushinError, ValueError):
    pass


class DomainViolation(GrushinError, ValueError):
    pass


class PoleHit(GrushinError, ZeroDivisionError):
    pass


class NotEntireAffine(GrushinError, ValueError):
    pass


class DomainMismatch(GrushinError, ValueError):
    pass


class NotInvertibleSymbolically(GrushinError, ValueError):
    pass


class GridTooCoarse(GrushinError, ValueError):
    pass


class DegenerateDerivative(GrushinError, ArithmeticError):
    pass


class SearchBudgetExceeded(GrushinError, RuntimeError):
    pass


class DocumentError(GrushinError, ValueError):
    """Malformed input document; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
