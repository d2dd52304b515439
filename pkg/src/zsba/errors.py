"""Exception types shared across the package."""


class ZsbaError(Exception):
    """Base class for every error this package raises on purpose."""


# similarity algebra

class ZeroVectorError(ZsbaError):
    """Normalization and cosine similarity are undefined for zero vectors."""


class DimensionMismatchError(ZsbaError):
    pass


class EmptyVocabularyError(ZsbaError):
    pass


class EmptyScoresError(ZsbaError):
    pass


class NonFiniteError(ZsbaError):
    """Embeddings and scores must contain only finite values."""


# parsing and validation

class ParseError(ZsbaError):
    """A file could not be parsed; the message points at the spot."""


class ValidationError(ZsbaError):
    """A well-formed file or value violates one of its invariants."""


class TaskKindError(ValidationError):
    """Operation applied to a task of the wrong kind."""


# binary embedding container

class FormatError(ZsbaError):
    """Base for embedding-container format errors."""


class BadMagicError(FormatError):
    pass


class BadVersionError(FormatError):
    pass


class TruncatedFileError(FormatError):
    pass


class DuplicateKeyError(FormatError):
    pass


class TrailingDataError(FormatError):
    pass


class MissingKeyError(ZsbaError):
    """A required embedding key was never exported to the store."""


# masks

class RleLengthMismatchError(ZsbaError):
    """RLE counts do not add up to width * height."""


class OverlappingMasksError(ZsbaError):
    pass


class RowCountMismatchError(ZsbaError):
    pass


# datasets and metrics

class ManifestError(ZsbaError):
    pass


class UnknownSampleError(ZsbaError):
    pass


class EmptyDatasetError(ZsbaError):
    pass


class ShapeMismatchError(ZsbaError):
    pass


class LengthMismatchError(ZsbaError):
    pass
