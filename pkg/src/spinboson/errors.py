"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (CLI exit code 1),
numerical failures from :class:`NumericalError` (exit code 2) and I/O problems
from :class:`IoError` (exit code 3).
"""


class SpinBosonError(Exception):
    exit_code = 2


class ValidationError(SpinBosonError, ValueError):
    exit_code = 1


class DomainError(ValidationError):
    """A parameter is outside its physical domain.

    ``field`` names the offending parameter.
    """

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or field)


class ConfigError(ValidationError):
    pass


class FrequencyNotOnGrid(ValidationError):
    pass


class NumericalError(SpinBosonError):
    exit_code = 2


class CutoffTooSmall(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


class SuperradiantRegime(NumericalError):
    """Normal-phase formula evaluated at or beyond the transition.

    ``factor`` identifies the offending factor (``"zero_mode"`` or the
    Matsubara index as ``"n=<k>"``) and ``condition`` is the offending value.
    """

    def __init__(self, message, factor="zero_mode", condition=None):
        self.factor = factor
        self.condition = condition
        super().__init__(message)


class PoleProximity(NumericalError):
    pass


class PoleDense(NumericalError):
    pass


class DimensionOverflow(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class TruncationUnconverged(NumericalError):
    def __init__(self, message, delta=None):
        self.delta = delta
        super().__init__(message)


class NonHermitianOrdering(NumericalError):
    pass


class IoError(SpinBosonError, OSError):
    exit_code = 3
