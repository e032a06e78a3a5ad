"""Exception hierarchy shared by all modules."""


class AvgReconError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(AvgReconError, ValueError):
    """Inputs violate a documented precondition."""


class NumericalError(AvgReconError, ArithmeticError):
    """A numerical safeguard tripped during evaluation."""


class AtomOutOfCube(ValidationError):
    pass


class WeightsNotProbability(ValidationError):
    pass


class MixedWidths(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class WidthConditionViolated(ValidationError):
    pass


class SampleCountTooSmall(ValidationError):
    pass


class ModeUnavailable(ValidationError):
    pass


class IncompletePatch(ValidationError):
    pass


class NonFiniteIntegrand(NumericalError):
    pass


class NearZeroDenominator(NumericalError):
    pass


class ImaginaryResidue(NumericalError):
    pass
