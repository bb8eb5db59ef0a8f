"""Exception types raised across the package."""


class IntPointsError(Exception):
    """Base class for all package errors."""


class ValidationError(IntPointsError, ValueError):
    """Malformed input (bad JSON, inconsistent box, wrong curve shape)."""


class UnsupportedForm(ValidationError):
    """Weierstrass model outside the supported family (a1 != 0)."""


class SingularCurve(ValidationError):
    """Operation needs a nonsingular curve but the discriminant vanishes."""


class BoxTooLarge(ValidationError):
    """Box exceeds the desk-scale enumeration guard."""


class BadReduction(ValidationError):
    """Prime divides 6 times the discriminant."""


class DegenerateSieve(ValidationError):
    """Large sieve called with alpha >= 1 or an empty prime set."""


class NumericError(IntPointsError, ArithmeticError):
    """Base class for numerical failures."""


class NonConvergence(NumericError):
    pass


class DomainError(NumericError, ValueError):
    pass


class BracketFailure(NumericError):
    pass


class NoRoot(NumericError):
    pass


class PrecisionOverflow(NumericError):
    pass
