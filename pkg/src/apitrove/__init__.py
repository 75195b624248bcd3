"""apitrove: multi-source API information harvesting, linking, and search."""

from .apimap import (
    ApiMapDatabase,
    LibraryManifest,
    build_api_map,
    load_library_manifest,
    lookup_candidates,
    lookup_library,
)
from .engine import DEFAULT_K, AggregatedResult, RetrievalMode, RetrievedItem, retrieve
from .errors import (
    ApitroveError,
    DuplicateLibraryIdError,
    DuplicateSignatureError,
    EmptyQueryError,
    LinkModeViolationError,
    MalformedParamsError,
    ManifestSyntaxError,
    QueryParseError,
    SourceMismatchError,
    StorageFailureError,
    UnknownSourceError,
    UnreadableInputError,
)
from .linkers import (
    CodeFacts,
    LinkerConfig,
    LinkerDescriptor,
    link_code_snippet,
    link_library_text,
    link_post,
)
from .model import (
    ApiIdentifier,
    ContentRecord,
    LibraryRef,
    Link,
    LinkKind,
    LinkingMode,
    SourceKind,
    parse_api_query,
    simple_name,
)
from .pipeline import IngestReport, ingest_file, load_api_map, register_libraries
from .service import ServiceConfig, create_app
from .store import BM25Params, ContentStore, IndexStats, Posting, bm25_score, tokenize

__version__ = "0.1.0"

__all__ = [
    "AggregatedResult",
    "ApiIdentifier",
    "ApiMapDatabase",
    "ApitroveError",
    "BM25Params",
    "CodeFacts",
    "ContentRecord",
    "ContentStore",
    "DEFAULT_K",
    "DuplicateLibraryIdError",
    "DuplicateSignatureError",
    "EmptyQueryError",
    "IndexStats",
    "IngestReport",
    "LibraryManifest",
    "LibraryRef",
    "Link",
    "LinkKind",
    "LinkModeViolationError",
    "LinkerConfig",
    "LinkerDescriptor",
    "LinkingMode",
    "MalformedParamsError",
    "ManifestSyntaxError",
    "Posting",
    "QueryParseError",
    "RetrievalMode",
    "RetrievedItem",
    "ServiceConfig",
    "SourceKind",
    "SourceMismatchError",
    "StorageFailureError",
    "UnknownSourceError",
    "UnreadableInputError",
    "bm25_score",
    "build_api_map",
    "create_app",
    "ingest_file",
    "link_code_snippet",
    "link_library_text",
    "link_post",
    "load_api_map",
    "load_library_manifest",
    "lookup_candidates",
    "lookup_library",
    "parse_api_query",
    "register_libraries",
    "retrieve",
    "simple_name",
    "tokenize",
    "__version__",
]
