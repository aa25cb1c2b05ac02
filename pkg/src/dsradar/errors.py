"""Exception types raised across the package."""


class DSRadarError(Exception):
    """Base class for all package errors."""


class ValidationError(DSRadarError, ValueError):
    """Bad user-supplied input (maps to CLI exit code 1)."""


class NotADifferenceSet(ValidationError):
    pass


class DuplicateElements(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


class WrongResidueClass(ValidationError):
    pass


class UnknownName(ValidationError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown name"


class NonPositiveParameter(ValidationError):
    pass


class TooManyIndices(ValidationError):
    pass


class DSOutOfRange(ValidationError):
    pass


class ZeroColumn(ValidationError):
    pass


class DimensionOverflow(DSRadarError):
    """A dense Kronecker dictionary would exceed the memory budget."""


class WrongKind(ValidationError):
    pass


class QuadratureFailure(DSRadarError):
    pass


class DelayOverrun(ValidationError):
    pass


class NumericallyUnsampledBin(DSRadarError):
    """A sampled Fourier bin carries (almost) no waveform energy."""


class RankDeficientSupport(DSRadarError):
    pass


class EmptyTrialSet(ValidationError):
    pass


class NoDetections(DSRadarError):
    pass


class ConfigError(ValidationError):
    pass


class KindMismatch(ValidationError):
    pass
