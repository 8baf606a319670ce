"""
Error hierarchy for wittlab.

Every error carries the process exit code the CLI reports for it:
2 for configuration problems, 1 for failed checks, 3 for internal
inconsistencies that indicate a bug.
"""


class WittlabError(Exception):
    """Base class for all wittlab errors."""

    exit_code = 1


class ConfigError(WittlabError, ValueError):
    exit_code = 2


class InvalidDescriptor(WittlabError, ValueError):
    exit_code = 2


class NotDivisible(WittlabError, ArithmeticError):
    """No quotient exists for an exact division."""


class AmbiguousQuotient(WittlabError, ArithmeticError):
    """More than one quotient exists (zero-divisor case)."""


class NotIntegral(WittlabError, ArithmeticError):
    """A value left the p-local integers."""


class NotFinite(WittlabError, ValueError):
    pass


class NoLiftDeclared(WittlabError, ValueError):
    pass


class NotNilpotent(WittlabError, ValueError):
    pass


class LengthMismatch(WittlabError, ValueError):
    pass


class RingMismatch(WittlabError, ValueError):
    pass


class BadConstantTerm(WittlabError, ValueError):
    pass


class NonRationalCoefficients(WittlabError, ValueError):
    pass


class InternalConsistencyError(WittlabError):
    """Raised when two independent computations disagree."""

    exit_code = 3


class MismatchWithClosedForm(InternalConsistencyError):
    pass


class IntegralityViolation(InternalConsistencyError):
    pass


class CorruptCache(InternalConsistencyError):
    pass
