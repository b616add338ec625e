"""Exception hierarchy for concurrence_lab.

Every error derives from :class:`ConcurrenceLabError`, which is a
``ValueError`` so callers validating user input can catch it generically.
"""


class ConcurrenceLabError(ValueError):
    pass


class ZeroNorm(ConcurrenceLabError):
    pass


class InvalidState(ConcurrenceLabError):
    pass


class InvalidDensityMatrix(ConcurrenceLabError):
    pass


class IndexOutOfRange(ConcurrenceLabError):
    pass


class EqualIndices(ConcurrenceLabError):
    pass


class OverlappingPairs(ConcurrenceLabError):
    pass


class MixedKinds(ConcurrenceLabError):
    pass


class DimensionMismatch(ConcurrenceLabError):
    pass


class DimensionTooSmall(ConcurrenceLabError):
    pass


class MissingSetup(ConcurrenceLabError):
    pass


class DuplicateSetup(ConcurrenceLabError):
    pass


class WrongScheme(ConcurrenceLabError):
    pass


class InvalidSetup(ConcurrenceLabError):
    pass


class InvalidRank(ConcurrenceLabError):
    pass


class MalformedStateFile(InvalidState):
    """State file could not be parsed (bad JSON, wrong lengths, non-finite numbers)."""
