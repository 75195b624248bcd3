"""Retrieval engine: map the query to its library, dispatch per source, aggregate.

For every query the engine produces one ranked list per source kind.
API-linked sources answer from the link index using the query's signature
candidates; library-linked sources answer from the link index using the
resolved libraries; unlinked sources fall back to BM25 full-text ranking.
When a link-backed source has no linked records the engine also falls back to
BM25 (unless strict mode is on), reporting the retrieval mode honestly so the
provenance of every result stays visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .apimap import ApiMapDatabase, lookup_candidates, lookup_library
from .model import ApiIdentifier, ContentRecord, LibraryRef, LinkingMode, SourceKind, parse_api_query
from .store import ContentStore

# The per-source result list length used when callers do not ask for one.
DEFAULT_K = 100


class RetrievalMode(str, Enum):
    API_LINK = "api_link"
    LIBRARY_LINK = "library_link"
    BM25 = "bm25"


@dataclass(frozen=True, slots=True)
class RetrievedItem:
    record: ContentRecord
    score: float
    mode: RetrievalMode


@dataclass(frozen=True, slots=True)
class AggregatedResult:
    """Per-source ranked results for one query; every source kind is a key."""

    query: ApiIdentifier
    resolved_libraries: tuple[LibraryRef, ...]
    per_source: dict[SourceKind, list[RetrievedItem]]


def retrieve(
    raw_query: str,
    store: ContentStore,
    map_db: ApiMapDatabase,
    k: int = DEFAULT_K,
    *,
    strict: bool = False,
) -> AggregatedResult:
    """Answer one API query across every source.

    Raises the originating parse error for malformed queries; an API absent
    from the map is not an error, it just resolves no libraries and the
    link-backed tabs degrade to BM25 (or stay empty in strict mode).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    api = parse_api_query(raw_query)
    candidates = lookup_candidates(api, map_db)
    libraries = lookup_library(api, map_db)

    fqns = sorted({fqn for _, fqn in candidates})
    if api.is_fully_qualified and api.render() not in fqns:
        fqns.append(api.render())

    per_source: dict[SourceKind, list[RetrievedItem]] = {}
    for source in SourceKind:
        mode = source.linking_mode
        if mode is LinkingMode.API_LINKED:
            items = _linked_items(store, source, fqns, RetrievalMode.API_LINK)
        elif mode is LinkingMode.LIBRARY_LINKED:
            targets = [lib.library_id for lib in libraries]
            items = _linked_items(store, source, targets, RetrievalMode.LIBRARY_LINK)
        else:
            items = _bm25_items(store, source, raw_query, k)
        if not items and mode is not LinkingMode.UNLINKED and not strict:
            items = _bm25_items(store, source, raw_query, k)
        per_source[source] = items[:k]

    return AggregatedResult(
        query=api,
        resolved_libraries=tuple(libraries),
        per_source=per_source,
    )


def _linked_items(
    store: ContentStore,
    source: SourceKind,
    targets: list[str],
    mode: RetrievalMode,
) -> list[RetrievedItem]:
    best: dict[str, tuple[float, ContentRecord]] = {}
    for target in targets:
        for record in store.query_by_link(target, source):
            confidence = store.link_confidence(record, target)
            current = best.get(record.content_id)
            if current is None or confidence > current[0]:
                best[record.content_id] = (confidence, record)
    ranked = sorted(best.values(), key=lambda pair: (-pair[0], pair[1].content_id))
    return [RetrievedItem(record=r, score=c, mode=mode) for c, r in ranked]


def _bm25_items(
    store: ContentStore, source: SourceKind, query: str, k: int
) -> list[RetrievedItem]:
    return [
        RetrievedItem(record=record, score=score, mode=RetrievalMode.BM25)
        for record, score in store.query_bm25(query, source, k)
    ]
