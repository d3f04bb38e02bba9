"""Exception types shared across the pipeline stages."""


class CluShapeError(Exception):
    """Base class for all pipeline errors."""


class WrongMagic(CluShapeError):
    """IDX magic number does not match the requested record kind."""


class Truncated(CluShapeError):
    """IDX payload is shorter than the header-declared item count."""


class EmptyCloud(CluShapeError):
    """Operation requires a non-empty point cloud."""


class TooFewPoints(CluShapeError):
    """Operation requires more points than the cloud provides."""


class TooLarge(CluShapeError):
    """Input exceeds the size guard of an exhaustive oracle."""


class TooFew(CluShapeError):
    """Pairwise computation needs at least two diagrams."""


class Empty(CluShapeError):
    """Statistical summary of an empty distance list is undefined."""


class MissingBlock(CluShapeError):
    """An image lacks a (setting, linkage) summary or dim-1 block."""


class EmptyTrainingSet(CluShapeError):
    """Forest training requires at least one row."""


class ArityMismatch(CluShapeError):
    """Prediction input does not match the training column arity."""


class KTooLarge(CluShapeError):
    """Requested more top features than exist."""


class ClassTooSmall(CluShapeError):
    """A class has fewer members than the fold count."""


class LengthMismatch(CluShapeError):
    """Paired sequences have different lengths."""


class TooFewFolds(CluShapeError):
    """Paired t-test needs at least two folds."""


class BadDigit(CluShapeError):
    """Digit label outside 0..9."""


class MissingData(CluShapeError):
    """Required input files are absent."""


class CacheCorrupt(CluShapeError):
    """Cache entry failed its integrity check."""
