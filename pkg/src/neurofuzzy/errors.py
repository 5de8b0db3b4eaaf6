"""Exception hierarchy shared by all neurofuzzy modules."""


class NeuroFuzzyError(Exception):
    """Base class for all errors raised by this package."""


# --- universe / membership construction ---

class NonPositiveResolution(NeuroFuzzyError):
    pass


class EmptyRange(NeuroFuzzyError):
    pass


class MisalignedRange(NeuroFuzzyError):
    """Universe span is not an integer multiple of the resolution."""


class OutOfRange(NeuroFuzzyError):
    """Crisp value lies outside the universe."""


class NegativeSupport(NeuroFuzzyError):
    pass


class DegenerateFuzzification(NeuroFuzzyError):
    """Fuzzification produced an all-zero membership vector."""


class AllZeroMembership(NeuroFuzzyError):
    """Defuzzification of a membership vector with no activation."""


class UniverseMismatch(NeuroFuzzyError):
    pass


class ZeroVector(NeuroFuzzyError):
    pass


# --- operators ---

class EmptyOperands(NeuroFuzzyError):
    pass


class OperandOutOfRange(NeuroFuzzyError):
    pass


# --- network ---

class UntrainedNetwork(NeuroFuzzyError):
    pass


class TargetOutOfRange(NeuroFuzzyError):
    pass


class Unclassifiable(NeuroFuzzyError):
    """All output activations are zero; argmax is meaningless."""


class CapacityExceeded(NeuroFuzzyError):
    pass


class MalformedPayload(NeuroFuzzyError):
    pass


class VersionMismatch(NeuroFuzzyError):
    pass


# --- crossbar ---

class ReadDisturbRisk(NeuroFuzzyError):
    """A read voltage at or above the device threshold could alter state."""


class DimensionMismatch(NeuroFuzzyError):
    pass


class RowInUse(NeuroFuzzyError):
    pass


class VoltageEncodingOutOfRange(NeuroFuzzyError):
    pass


class WeightOutOfRange(NeuroFuzzyError):
    pass


# --- experiments ---

class DomainViolation(NeuroFuzzyError):
    pass


class UnknownDatasetId(NeuroFuzzyError):
    pass


class ConstantActual(NeuroFuzzyError):
    """FVU denominator is zero: the reference signal is constant."""


class LengthMismatch(NeuroFuzzyError):
    pass


# --- cli ---

class ConfigError(NeuroFuzzyError):
    pass
