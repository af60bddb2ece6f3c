"""Exception hierarchy for the mlynar package."""


class MlynarError(ValueError):
    """Base class for invalid arguments to any mlynar routine."""


class InvalidFaceCount(MlynarError):
    pass


class InvalidEpsilon(MlynarError):
    pass


class FullTableTooLarge(MlynarError):
    pass


class OutOfSupport(MlynarError):
    pass


class TooLargeForExact(MlynarError):
    pass


class TooLargeForEnumeration(MlynarError):
    pass


class ExponentTooLarge(MlynarError):
    pass


class DegenerateFit(MlynarError):
    pass


class NonpositiveDelta(MlynarError):
    pass
