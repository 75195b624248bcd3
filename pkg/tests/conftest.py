"""Shared fixtures: the hand-scored corpus, stores built from it, and the
brute-force BM25 oracle used to cross-check ranked retrieval."""

import math
from pathlib import Path

import pytest

from apitrove.model import SourceKind
from apitrove.pipeline import ingest_path, register_libraries
from apitrove.store import BM25Params, ContentStore, tokenize

FIXTURES = Path(__file__).parent / "fixtures"
MANIFEST_DIR = FIXTURES / "manifests"
CORPUS_DIR = FIXTURES / "corpus"

CORPUS_FILES = {
    SourceKind.QA_POST: CORPUS_DIR / "qa_posts.jsonl",
    SourceKind.CODE_SNIPPET: CORPUS_DIR / "code_snippets.jsonl",
    SourceKind.MICROBLOG: CORPUS_DIR / "microblogs.jsonl",
    SourceKind.CVE_ENTRY: CORPUS_DIR / "cve_entries.jsonl",
    SourceKind.VIDEO_METADATA: CORPUS_DIR / "video_metadata.jsonl",
}

FIG2_QUERY = "com.google.common.base.Object.hashCode()"


def build_fixture_store(store_dir: Path) -> dict[SourceKind, object]:
    """Register the bundled manifests and ingest the whole corpus."""
    db = register_libraries(MANIFEST_DIR, store_dir)
    reports = {}
    with ContentStore.open(store_dir, create=True) as store:
        for source, path in CORPUS_FILES.items():
            reports[source] = ingest_path(source, path, db, store)
    return reports


@pytest.fixture(scope="session")
def fixture_store_dir(tmp_path_factory) -> Path:
    """A store with the full fixture corpus, built once and opened read-only."""
    store_dir = tmp_path_factory.mktemp("fixture-store") / "store"
    build_fixture_store(store_dir)
    return store_dir


def brute_force_bm25(store, query, source, k, params=BM25Params()):
    """Independent ranking oracle: score every document directly, sort stably.

    Deliberately avoids the store's inverted index; it walks all records,
    recounts term frequencies, and applies the scoring formula from scratch.
    """
    stats = store.stats(source)
    query_tokens = set(tokenize(query))
    scored = []
    for record in store.records(source):
        tokens = tokenize(record.title) + tokenize(record.body)
        term_freqs = {}
        for t in tokens:
            term_freqs[t] = term_freqs.get(t, 0) + 1
        score = 0.0
        for t in query_tokens:
            f = term_freqs.get(t, 0)
            if not f:
                continue
            token_idf = math.log(
                1 + (stats.doc_count - stats.doc_freq[t] + 0.5) / (stats.doc_freq[t] + 0.5)
            )
            norm = 1 - params.b + params.b * len(tokens) / stats.avg_doc_len
            score += token_idf * f * (params.k1 + 1) / (f + params.k1 * norm)
        if score > 0:
            scored.append((record.content_id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
