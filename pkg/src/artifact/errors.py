"""Exception hierarchy shared by all modules."""


class ArtifactError(Exception):
    """Base class for every error raised by the library."""


class NonInjective(ArtifactError):
    pass


class IndexInfinite(ArtifactError):
    pass


class DimensionMismatch(ArtifactError):
    pass


class UnsupportedRank(ArtifactError):
    pass


class UnsupportedFamily(ArtifactError):
    pass


class RealizationMismatch(ArtifactError):
    """A conjugated root-group element is not in a root group (internal bug)."""


class NoDecomposition(ArtifactError):
    pass


class ParityViolation(ArtifactError):
    pass


class NonDecomposable(ArtifactError):
    pass


class ExtensionMismatch(ArtifactError):
    pass


class CoeffMismatch(ArtifactError):
    pass


class ParentsDiffer(ArtifactError):
    pass


class HypothesisViolation(ArtifactError):
    pass


class IncompatibleMaps(ArtifactError):
    pass


class ZeroInput(ArtifactError):
    pass


class InsufficientPrecision(ArtifactError):
    pass


class FieldMismatch(ArtifactError):
    pass


class NotInGroup(ArtifactError):
    pass


class NotUnipotentInFlag(ArtifactError):
    pass


class ShapeMismatch(ArtifactError):
    pass


class TooLarge(ArtifactError):
    pass


class UsageError(ArtifactError):
    pass


class InvalidField(ArtifactError):
    """Bad field descriptor, or the tame condition fails."""


class CheckFailure(ArtifactError):
    pass
