"""The API database: persistent content store, per-source inverted index, BM25.

On disk a store is a directory holding an append-only ``content.log`` (one
JSON record per line; a re-put of an existing content_id appends a superseding
line) and a ``manifest`` file whose first byte is the format version followed
by a JSON stats checkpoint. The log is the source of truth: opening a store
replays it and rebuilds the in-memory inverted index, so the checkpoint is
informational. ``compact()`` rewrites the log without superseded entries.

Concurrency: a single writer (the ingest pipeline) and any number of readers.
A store-wide lock serializes mutations and makes every query observe the
store between whole writes, which is the snapshot behavior the retrieval
engine relies on.
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping

from .errors import StorageFailureError
from .model import ContentRecord, SourceKind, record_from_dict, record_to_dict

FORMAT_VERSION = 1

_WORD_RE = re.compile(r"[^\W_]+")
_DOTTED_RE = re.compile(r"[^\W\d_][^\W_]*(?:\.[^\W\d_][^\W_]*)+")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens, plus each dotted identifier as one extra token.

    Splitting happens on every non-alphanumeric character, so
    ``"Objects.hashCode"`` yields ``["objects", "hashcode"]``; the full dotted
    form ``"objects.hashcode"`` is then appended so qualified-name queries can
    match exactly. Number-only dot chains ("1.2") are not identifiers and get
    no extra token.
    """
    base = _WORD_RE.findall(text.lower())
    dotted = [m.group(0).lower() for m in _DOTTED_RE.finditer(text)]
    return base + dotted


@dataclass(frozen=True, slots=True)
class BM25Params:
    """Okapi BM25 tuning: k1 saturates term frequency, b normalizes length."""

    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 <= 0:
            raise ValueError("k1 must be > 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


@dataclass(frozen=True, slots=True)
class IndexStats:
    """Per-source corpus statistics feeding the BM25 formula."""

    doc_count: int
    avg_doc_len: float
    doc_freq: Mapping[str, int]


@dataclass(frozen=True, slots=True)
class Posting:
    content_id: str
    term_frequency: int
    doc_len: int


def idf(token: str, stats: IndexStats) -> float:
    """Non-negative inverse document frequency: ln(1 + (N - n + 0.5)/(n + 0.5)).

    The raw Robertson IDF can go negative for terms in more than half the
    corpus; this variant never does.
    """
    n = stats.doc_freq.get(token, 0)
    return math.log(1.0 + (stats.doc_count - n + 0.5) / (n + 0.5))


def bm25_score(
    query_tokens: list[str],
    term_freqs: Mapping[str, int],
    doc_len: int,
    stats: IndexStats,
    params: BM25Params = BM25Params(),
) -> float:
    """BM25 score of one document against a tokenized query.

    Duplicate query tokens are counted once; tokens absent from the document
    contribute zero.
    """
    score = 0.0
    for token in set(query_tokens):
        f = term_freqs.get(token, 0)
        if f == 0:
            continue
        if stats.avg_doc_len > 0:
            length_norm = 1.0 - params.b + params.b * doc_len / stats.avg_doc_len
        else:
            length_norm = 1.0
        score += idf(token, stats) * f * (params.k1 + 1.0) / (f + params.k1 * length_norm)
    return score


class ContentStore:
    """Durable content store with per-source inverted index and link index."""

    def __init__(self, directory: Path):
        self._dir = directory
        self._log_path = directory / "content.log"
        self._manifest_path = directory / "manifest"
        self._lock = threading.RLock()
        self._closed = False
        self._records: dict[str, ContentRecord] = {}
        # per source: token -> {content_id -> term frequency}
        self._postings: dict[SourceKind, dict[str, dict[str, int]]] = {
            s: {} for s in SourceKind
        }
        self._doc_len: dict[SourceKind, dict[str, int]] = {s: {} for s in SourceKind}
        self._total_len: dict[SourceKind, int] = {s: 0 for s in SourceKind}
        self._link_index: dict[str, set[str]] = {}
        self._log_handle = None

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def open(cls, directory: str | Path, *, create: bool = False) -> "ContentStore":
        """Open a store directory, optionally creating an empty one.

        Refuses to open a directory whose manifest carries an unknown format
        version, or one that has content but no manifest.
        """
        directory = Path(directory)
        store = cls(directory)
        if not directory.exists():
            if not create:
                raise StorageFailureError(f"store directory {directory} does not exist")
            directory.mkdir(parents=True)
        if store._manifest_path.exists():
            store._check_version()
        elif store._log_path.exists():
            raise StorageFailureError(f"{directory}: content.log present but manifest missing")
        elif not create:
            raise StorageFailureError(f"{directory} is not a content store (no manifest)")
        store._replay_log()
        if not store._manifest_path.exists():
            store._write_manifest()
        return store

    def _check_version(self) -> None:
        try:
            head = self._manifest_path.read_bytes()
        except OSError as exc:
            raise StorageFailureError(f"cannot read {self._manifest_path}: {exc}") from exc
        if not head:
            raise StorageFailureError(f"{self._manifest_path} is empty")
        version = head[0]
        if version != FORMAT_VERSION:
            raise StorageFailureError(
                f"{self._dir}: unsupported store format version {version}"
            )

    def _replay_log(self) -> None:
        if not self._log_path.exists():
            return
        try:
            with self._log_path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = record_from_dict(json.loads(line))
                        record.validate()
                    except (ValueError, KeyError) as exc:
                        raise StorageFailureError(
                            f"{self._log_path}:{lineno}: corrupt record: {exc}"
                        ) from exc
                    self._apply(record)
        except OSError as exc:
            raise StorageFailureError(f"cannot read {self._log_path}: {exc}") from exc

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self.flush()
            if self._log_handle is not None:
                self._log_handle.close()
                self._log_handle = None
            self._closed = True

    def __enter__(self) -> "ContentStore":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def flush(self) -> None:
        """Refresh the manifest checkpoint from current stats."""
        with self._lock:
            self._write_manifest()

    def _write_manifest(self) -> None:
        checkpoint = {
            "record_count": len(self._records),
            "per_source": {
                s.value: {
                    "doc_count": len(self._doc_len[s]),
                    "avg_doc_len": self._avgdl(s),
                }
                for s in SourceKind
            },
        }
        payload = bytes([FORMAT_VERSION]) + json.dumps(checkpoint).encode("utf-8")
        tmp = self._manifest_path.with_suffix(".tmp")
        try:
            tmp.write_bytes(payload)
            os.replace(tmp, self._manifest_path)
        except OSError as exc:
            raise StorageFailureError(f"cannot write {self._manifest_path}: {exc}") from exc

    # -- writes ------------------------------------------------------------

    def put_content(self, record: ContentRecord) -> str:
        """Persist and index a record; re-putting a content_id replaces it."""
        record.validate()
        with self._lock:
            if self._closed:
                raise StorageFailureError("store is closed")
            self._append_log(record)
            self._apply(record)
        return record.content_id

    def _append_log(self, record: ContentRecord) -> None:
        try:
            if self._log_handle is None:
                self._log_handle = self._log_path.open("a", encoding="utf-8")
            self._log_handle.write(json.dumps(record_to_dict(record)) + "\n")
            self._log_handle.flush()
        except OSError as exc:
            raise StorageFailureError(f"cannot append to {self._log_path}: {exc}") from exc

    def _apply(self, record: ContentRecord) -> None:
        previous = self._records.get(record.content_id)
        if previous is not None:
            self._retract(previous)
        self._records[record.content_id] = record

        tokens = tokenize(record.title) + tokenize(record.body)
        source = record.source
        self._doc_len[source][record.content_id] = len(tokens)
        self._total_len[source] += len(tokens)
        postings = self._postings[source]
        for token in tokens:
            postings.setdefault(token, {})
            postings[token][record.content_id] = postings[token].get(record.content_id, 0) + 1
        for link in record.links:
            self._link_index.setdefault(link.target_key, set()).add(record.content_id)

    def _retract(self, record: ContentRecord) -> None:
        source = record.source
        tokens = tokenize(record.title) + tokenize(record.body)
        postings = self._postings[source]
        for token in set(tokens):
            entry = postings.get(token)
            if entry is None:
                continue
            entry.pop(record.content_id, None)
            if not entry:
                del postings[token]
        length = self._doc_len[source].pop(record.content_id, 0)
        self._total_len[source] -= length
        for link in record.links:
            ids = self._link_index.get(link.target_key)
            if ids is not None:
                ids.discard(record.content_id)
                if not ids:
                    del self._link_index[link.target_key]

    def compact(self) -> None:
        """Rewrite the log keeping only the latest version of each record."""
        with self._lock:
            if self._log_handle is not None:
                self._log_handle.close()
                self._log_handle = None
            tmp = self._log_path.with_suffix(".tmp")
            try:
                with tmp.open("w", encoding="utf-8") as fh:
                    for content_id in sorted(self._records):
                        fh.write(json.dumps(record_to_dict(self._records[content_id])) + "\n")
                os.replace(tmp, self._log_path)
            except OSError as exc:
                raise StorageFailureError(f"cannot compact {self._log_path}: {exc}") from exc
            self._write_manifest()

    # -- reads -------------------------------------------------------------

    def get(self, content_id: str) -> ContentRecord | None:
        with self._lock:
            return self._records.get(content_id)

    def __contains__(self, content_id: str) -> bool:
        return self.get(content_id) is not None

    def count(self, source: SourceKind | None = None) -> int:
        with self._lock:
            if source is None:
                return len(self._records)
            return len(self._doc_len[source])

    def records(self, source: SourceKind | None = None) -> Iterator[ContentRecord]:
        with self._lock:
            snapshot = [
                r
                for r in self._records.values()
                if source is None or r.source is source
            ]
        return iter(sorted(snapshot, key=lambda r: r.content_id))

    def _avgdl(self, source: SourceKind) -> float:
        n = len(self._doc_len[source])
        return self._total_len[source] / n if n else 0.0

    def stats(self, source: SourceKind) -> IndexStats:
        with self._lock:
            return IndexStats(
                doc_count=len(self._doc_len[source]),
                avg_doc_len=self._avgdl(source),
                doc_freq={t: len(ids) for t, ids in self._postings[source].items()},
            )

    def postings(self, source: SourceKind, token: str) -> list[Posting]:
        """Posting list for one token, sorted by content_id."""
        with self._lock:
            entry = self._postings[source].get(token, {})
            doc_len = self._doc_len[source]
            return [
                Posting(content_id=cid, term_frequency=tf, doc_len=doc_len[cid])
                for cid, tf in sorted(entry.items())
            ]

    def query_by_link(self, target: str, source: SourceKind) -> list[ContentRecord]:
        """Records of ``source`` linked to ``target``, best link confidence first."""
        with self._lock:
            ids = self._link_index.get(target, set())
            matches = []
            for content_id in ids:
                record = self._records[content_id]
                if record.source is not source:
                    continue
                confidence = max(
                    (l.confidence for l in record.links if l.target_key == target),
                    default=0.0,
                )
                matches.append((confidence, record))
        matches.sort(key=lambda pair: (-pair[0], pair[1].content_id))
        return [record for _, record in matches]

    def link_confidence(self, record: ContentRecord, target: str) -> float:
        """Highest confidence among the record's links to ``target``."""
        return max(
            (l.confidence for l in record.links if l.target_key == target),
            default=0.0,
        )

    def query_bm25(
        self,
        query: str,
        source: SourceKind,
        k: int,
        params: BM25Params = BM25Params(),
    ) -> list[tuple[ContentRecord, float]]:
        """Top-k records of ``source`` by BM25 against the tokenized query.

        Zero-score records are excluded; ties break on ascending content_id.
        The result is identical to brute-force scoring of every document.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        with self._lock:
            tokens = set(tokenize(query))
            n_docs = len(self._doc_len[source])
            if not n_docs:
                return []
            avgdl = self._avgdl(source)
            postings = self._postings[source]
            doc_len = self._doc_len[source]
            scores: dict[str, float] = {}
            for token in tokens:
                entry = postings.get(token)
                if not entry:
                    continue
                token_idf = math.log(
                    1.0 + (n_docs - len(entry) + 0.5) / (len(entry) + 0.5)
                )
                for content_id, f in entry.items():
                    if avgdl > 0:
                        length_norm = 1.0 - params.b + params.b * doc_len[content_id] / avgdl
                    else:
                        length_norm = 1.0
                    scores[content_id] = scores.get(content_id, 0.0) + (
                        token_idf * f * (params.k1 + 1.0) / (f + params.k1 * length_norm)
                    )
            ranked = sorted(
                ((cid, score) for cid, score in scores.items() if score > 0.0),
                key=lambda pair: (-pair[1], pair[0]),
            )
            return [(self._records[cid], score) for cid, score in ranked[:k]]
