"""Exception types shared by all periodkit modules."""


class PeriodkitError(Exception):
    """Base class for library errors."""


class DomainError(PeriodkitError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class SingularityError(DomainError):
    """Evaluation at an excluded point (e.g. xi = -1/alpha)."""


class DegenerateModeError(DomainError):
    """A mode sits on the double-root eigenvalue (2/alpha)^2."""


class NumericError(PeriodkitError, ArithmeticError):
    """A numerical procedure failed or produced an unusable value."""


class ConvergenceError(NumericError):
    """An iterative method stopped before reaching its tolerance.

    ``best`` holds the best iterate seen, so callers can still inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DetectionError(NumericError):
    """No usable Poincare-section crossings were found in a trajectory."""
