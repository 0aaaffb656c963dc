"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class HfvError(Exception):
    """Base class for all toolkit errors."""


class DatasetValidationError(HfvError):
    """An in-memory dataset or request violates a structural invariant."""


class WriteError(HfvError):
    """Filesystem write failed; message names the file involved."""


class TruncationError(HfvError):
    """A binary file ended before the expected number of bytes."""


class StructuralError(HfvError):
    """File contents contradict their own declared structure."""


class BoundsError(HfvError):
    """A requested index range falls outside the dataset's extents."""


class NameLookupError(HfvError):
    """A submodel (or group) name does not exist."""


class StaleCacheError(HfvError):
    """Project cache fingerprint no longer matches the source dataset."""


class CorruptCacheError(HfvError):
    """A cache file exists but its contents are unusable."""


class CacheRefusalError(HfvError):
    """Refused to operate on a directory that is not a project."""
