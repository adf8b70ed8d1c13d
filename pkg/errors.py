"""
stzero Errors
==============
Exception hierarchy shared by the library and the command layer.
"""


class StzeroError(Exception):
    """Base class for every error raised by stzero."""


class DimensionError(StzeroError):
    """Operand shapes do not agree."""


class ContractError(StzeroError):
    """A precondition of an operation was violated."""


class ConfigError(StzeroError):
    """Invalid or incompatible configuration."""


class CapacityError(StzeroError):
    """Input exceeds a capacity fixed at model construction."""


class NumericError(StzeroError):
    """Non-finite values appeared during computation."""


class CorruptionError(StzeroError):
    """A checkpoint file disagrees with its own manifest."""


class UnknownEntryError(StzeroError):
    """A requested slide or gene does not exist."""


class DataError(StzeroError):
    """Malformed or inconsistent input data."""


class EmptySlideError(DataError):
    """A slide with zero windows."""


class MissingFileError(DataError):
    """A file required by the dataset layout is absent."""


class SizeMismatchError(DataError):
    """A payload size disagrees with the shape declared in the manifest."""


class SplitOverlapError(DataError):
    """Seen and unseen gene lists are not a partition of the gene set."""


class NaNPayloadError(DataError):
    """A payload contains NaN or infinite values."""
