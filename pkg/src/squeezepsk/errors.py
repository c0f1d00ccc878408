"""Exception hierarchy.

Two families matter to callers: `ValidationError` for inputs that describe
no admissible physical configuration, and `NumericalError` for solvers that
could not meet their declared tolerance. The CLI maps them to exit codes 2
and 3 respectively.
"""


class SqueezePSKError(Exception):
    pass


class ValidationError(SqueezePSKError, ValueError):
    pass


class NumericalError(SqueezePSKError, ArithmeticError):
    pass


class EnergyBudgetExceeded(ValidationError):
    pass


class InvalidPurity(ValidationError):
    pass


class InvalidTransmissivity(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class UnknownKind(ValidationError):
    pass


class CutoffExceeded(NumericalError):
    pass


class UnitarityGuardFailed(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class BracketingFailed(NumericalError):
    pass
