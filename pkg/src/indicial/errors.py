"""Exception hierarchy.

Errors fall into three groups that the command line front end maps onto
exit codes: input validation, numerical (tolerance) failures, and violated
preconditions of an analysis.
"""


class IndicialError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IndicialError):
    """Malformed or inconsistent input."""


class NumericalError(IndicialError):
    """A tolerance-governed decision could not be made reliably."""


class PreconditionError(IndicialError):
    """An operation was requested outside the setting where it is defined."""


class NotHermitian(ValidationError):
    pass


class DimensionMismatch(NumericalError):
    pass


class SingularConstantTerm(NumericalError):
    pass


class NotSymmetric(ValidationError):
    pass


class WindowTooSmall(NumericalError):
    pass


class NotStarPaired(PreconditionError):
    pass


class NotCritical(PreconditionError):
    pass


class InvariantMismatch(NumericalError):
    pass


class TruncationExhausted(NumericalError):
    pass


class AmbiguousWindow(NumericalError):
    pass


class GramDegenerate(NumericalError):
    pass


class CanonicalFormFailure(NumericalError):
    pass


class SignConditionViolated(PreconditionError):
    pass


class NotSemibounded(PreconditionError):
    pass


class NoInvariantSelfadjointExtension(PreconditionError):
    pass


class NonIntegrable(PreconditionError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class PreconditionViolated(PreconditionError):
    """Inputs violate the hypotheses of a comparison or construction."""
