"""Exception hierarchy shared by every module of the lab."""


class EPDTError(ValueError):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    @property
    def code(self):
        return type(self).__name__


class ValidationError(EPDTError):
    pass


class NegativeDelta(ValidationError):
    pass


class NonpositiveDimension(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DimensionTooSmall(ValidationError):
    pass


class InvalidC(ValidationError):
    pass


class NearBoundary(ValidationError):
    pass


class OutsideCone(ValidationError):
    pass


class InvalidCriticalCondition(ValidationError):
    pass


class ZeroDenominator(ValidationError):
    pass


class DegenerateUpperLimit(ValidationError):
    pass


class CFLViolation(ValidationError):
    pass


class DomainTooSmall(ValidationError):
    pass


class NumericFailure(EPDTError):
    pass


class Nonconvergence(NumericFailure):
    pass


class QuadratureFailure(NumericFailure):
    pass


class StepUnderflow(NumericFailure):
    pass


class NonfiniteState(NumericFailure):
    pass


class SweepIncomplete(NumericFailure):
    pass
