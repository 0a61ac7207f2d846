"""Exception hierarchy shared by every module in the package."""


class SQKDError(Exception):
    """Base class for all errors raised by :mod:`sqkd`."""


class ValidationError(SQKDError, ValueError):
    """Input violates a documented precondition."""


class BiasRangeError(ValidationError):
    """Bias ``b`` is outside ``|b| <= 1/2 - 1e-6``."""


class NumericError(SQKDError, ArithmeticError):
    """An iterative routine failed to converge."""


class DegenerateAttackError(SQKDError):
    """The attack leaves no accepted iterations (normalization ~ 0)."""


class CapabilityError(SQKDError):
    """Request exceeds a documented size cap."""


class AbortCondition(SQKDError):
    """Statistics say the protocol must abort (too much noise)."""
