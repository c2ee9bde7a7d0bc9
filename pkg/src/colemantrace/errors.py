"""Exception hierarchy shared by all modules."""


class ColemanError(Exception):
    """Base class for every error raised by the package."""


class TowerError(ColemanError):
    """A defining polynomial or tower description was rejected."""


class RingMismatchError(ColemanError):
    """Operands live in different rings."""


class DivisibilityError(ColemanError):
    """An exact division was requested but the dividend is not divisible."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class NotInImageError(DivisibilityError):
    """De-substitution failed: the series is not of the form g(sigma(x))."""


class NonUnitError(ColemanError):
    """Inversion of an element with positive valuation."""


class DivergenceError(ColemanError):
    """A composition or formal sum would not converge coefficientwise."""


class InsufficientPrecisionError(ColemanError):
    """A congruence cannot be decided at the available precision."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class DescentError(ColemanError):
    """Non-base components of a symmetric sum did not vanish."""


class PreconditionError(ColemanError):
    """An input violates a documented precondition."""


class BudgetError(ColemanError):
    """The degree or precision budget cannot deliver the requested result."""


class ConvergenceError(ColemanError):
    """A successive-approximation loop stopped gaining valuation."""


class SerializationError(ColemanError):
    """A file could not be parsed or has the wrong version."""
