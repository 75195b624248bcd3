"""Exception hierarchy shared by all apitrove modules."""


class ApitroveError(Exception):
    """Base class for every error raised by this package."""


class QueryParseError(ApitroveError, ValueError):
    """An API query string could not be parsed."""


class EmptyQueryError(QueryParseError):
    """The query was empty after trimming whitespace."""


class MalformedParamsError(QueryParseError):
    """The query's parameter list has unbalanced or misplaced parentheses."""


class ManifestError(ApitroveError, ValueError):
    """Base class for library manifest problems."""


class ManifestSyntaxError(ManifestError):
    """A library manifest document is malformed or violates its schema."""


class DuplicateSignatureError(ManifestError):
    """A manifest lists the same fully-qualified signature twice."""


class DuplicateLibraryIdError(ManifestError):
    """Two manifests claim the same library_id."""


class SourceMismatchError(ApitroveError, ValueError):
    """A linker was handed a record from a source it does not support."""


class LinkModeViolationError(ApitroveError, ValueError):
    """A record carries links whose kind disagrees with its source's linking mode."""


class StorageFailureError(ApitroveError, RuntimeError):
    """The content store directory could not be opened, read, or written."""


class UnknownSourceError(ApitroveError, ValueError):
    """An ingest request named a source kind this system does not know."""


class UnreadableInputError(ApitroveError, RuntimeError):
    """An ingest input file could not be opened or read."""
