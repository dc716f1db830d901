"""Exception hierarchy shared by all oqwork modules."""


class OQError(ValueError):
    """Base class for every error raised by oqwork."""


class NonHermitian(OQError):
    pass


class NotPSD(OQError):
    pass


class InvalidState(OQError):
    pass


class BlochOutOfBall(OQError):
    pass


class DimMismatch(OQError):
    pass


class InvalidPovm(OQError):
    pass


class ChannelNotUnital(OQError):
    pass


class NegativeProbability(OQError):
    """A probability-scheme entry fell below the round-off clamp."""


class NotNormalized(OQError):
    pass


class BadPartition(OQError):
    pass


class BadMixingWeight(OQError):
    pass


class MissingEnergies(OQError):
    pass


class BetaNegative(OQError):
    pass


class BetaNonPositive(OQError):
    pass


class NonSharpMeasurement(OQError):
    pass


class SingularGibbs(OQError):
    pass


class NotTraceless(OQError):
    pass


class UnsupportedDim(OQError):
    pass


class SharpnessOutOfRange(OQError):
    pass


class DegenerateDirections(OQError):
    pass


class ConfigParseError(OQError):
    pass


class ConfigInvalid(OQError):
    pass
