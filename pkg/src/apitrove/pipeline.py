"""Ingestion pipeline: read source-tagged record files, link, and store.

Input files carry one JSON object per line with a per-source field schema
(see README). Records from sources with a linker are stored only when the
linker finds at least one relevant API or library; records from unlinked
sources are stored as-is with no links. Malformed lines never abort a batch;
they are skipped and reported in the :class:`IngestReport`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

from .apimap import (
    ApiMapDatabase,
    LibraryManifest,
    build_api_map,
    load_library_manifest,
    manifest_from_dict,
    manifest_to_dict,
)
from .errors import (
    DuplicateLibraryIdError,
    ManifestError,
    ManifestSyntaxError,
    UnknownSourceError,
    UnreadableInputError,
)
from .linkers import LinkerConfig, run_linker
from .model import ContentRecord, LinkingMode, SourceKind
from .store import ContentStore

LIBRARIES_FILE = "libraries.json"

# Required input fields per source, and how they map onto a ContentRecord.
_SCHEMAS: dict[SourceKind, tuple[str, ...]] = {
    SourceKind.QA_POST: ("id", "title", "body", "url"),
    SourceKind.CODE_SNIPPET: ("id", "code", "url"),
    SourceKind.MICROBLOG: ("id", "text", "url"),
    SourceKind.CVE_ENTRY: ("id", "description", "affected_products", "url"),
    SourceKind.VIDEO_METADATA: ("id", "title", "description", "url"),
}


@dataclass(slots=True)
class IngestReport:
    """Outcome counts for one ingest batch."""

    source: SourceKind
    read_count: int = 0
    linked_count: int = 0
    stored_count: int = 0
    rejected_count: int = 0
    errors: list[tuple[str, str]] = field(default_factory=list)

    @property
    def malformed_count(self) -> int:
        return len(self.errors)


def parse_source_kind(name: str) -> SourceKind:
    try:
        return SourceKind(name)
    except ValueError:
        known = ", ".join(s.value for s in SourceKind)
        raise UnknownSourceError(f"unknown source {name!r} (known: {known})") from None


def record_from_input(source: SourceKind, obj: Mapping[str, Any]) -> ContentRecord:
    """Build an unlinked ContentRecord from one parsed input object.

    Raises ValueError when required fields are missing or the record would
    have no text at all.
    """
    if not isinstance(obj, Mapping):
        raise ValueError("input line is not an object")
    missing = [f for f in _SCHEMAS[source] if f not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")

    native_id = obj["id"]
    if not isinstance(native_id, (str, int)) or native_id == "":
        raise ValueError("id must be a non-empty string or integer")
    content_id = f"{source.id_prefix}:{native_id}"
    url = str(obj["url"])

    metadata: dict[str, str] = {}
    if source is SourceKind.QA_POST:
        title, body = str(obj["title"]), str(obj["body"])
    elif source is SourceKind.CODE_SNIPPET:
        title, body = "", str(obj["code"])
    elif source is SourceKind.MICROBLOG:
        title, body = "", str(obj["text"])
    elif source is SourceKind.CVE_ENTRY:
        title, body = "", str(obj["description"])
        products = obj["affected_products"]
        if not isinstance(products, list):
            raise ValueError("affected_products must be a list")
        metadata["affected_products"] = "; ".join(str(p) for p in products)
    else:
        title, body = str(obj["title"]), str(obj["description"])

    record = ContentRecord(
        content_id=content_id,
        source=source,
        title=title,
        body=body,
        url=url,
        metadata=metadata,
    )
    record.validate()
    return record


def ingest_file(
    source: SourceKind,
    lines: Iterable[str],
    db: ApiMapDatabase,
    store: ContentStore,
    *,
    config: LinkerConfig | None = None,
    rejected_sink: IO[str] | None = None,
    locator: str = "input",
) -> IngestReport:
    """Ingest one batch of records for a single source.

    Linked sources store only records whose linker emitted at least one link;
    the rest count as rejected (optionally written to ``rejected_sink``).
    Unlinked sources store every well-formed record. Re-running on the same
    input is idempotent thanks to the store's upsert semantics.
    """
    config = config or LinkerConfig()
    report = IngestReport(source=source)
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        report.read_count += 1
        where = f"{locator}:{lineno}"
        try:
            obj = json.loads(line)
            record = record_from_input(source, obj)
        except (ValueError, TypeError) as exc:
            report.errors.append((where, str(exc)))
            continue

        if source.linking_mode is LinkingMode.UNLINKED:
            store.put_content(record)
            report.stored_count += 1
            continue

        links = run_linker(record, db, config) or []
        if links:
            store.put_content(replace(record, links=tuple(links)))
            report.linked_count += 1
            report.stored_count += 1
        else:
            report.rejected_count += 1
            if rejected_sink is not None:
                rejected_sink.write(line + "\n")
    store.flush()
    return report


def ingest_path(
    source: SourceKind,
    path: str | Path,
    db: ApiMapDatabase,
    store: ContentStore,
    *,
    config: LinkerConfig | None = None,
    rejected_sink: IO[str] | None = None,
) -> IngestReport:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            return ingest_file(
                source,
                fh,
                db,
                store,
                config=config,
                rejected_sink=rejected_sink,
                locator=str(path),
            )
    except OSError as exc:
        raise UnreadableInputError(f"cannot read {path}: {exc}") from exc


def load_manifest_dir(manifest_dir: str | Path) -> list[LibraryManifest]:
    """Load every ``*.json`` manifest in a directory, with file attribution."""
    manifest_dir = Path(manifest_dir)
    if not manifest_dir.is_dir():
        raise UnreadableInputError(f"{manifest_dir} is not a directory")
    manifests: list[LibraryManifest] = []
    seen: dict[str, str] = {}
    for path in sorted(manifest_dir.glob("*.json")):
        try:
            with path.open("rb") as fh:
                manifest = load_library_manifest(fh)
        except ManifestError as exc:
            raise type(exc)(f"{path.name}: {exc}") from exc
        except OSError as exc:
            raise UnreadableInputError(f"cannot read {path}: {exc}") from exc
        lib_id = manifest.library.library_id
        if lib_id in seen:
            raise DuplicateLibraryIdError(
                f"library_id {lib_id!r} defined in both {seen[lib_id]} and {path.name}"
            )
        seen[lib_id] = path.name
        manifests.append(manifest)
    return manifests


def register_libraries(
    manifest_dir: str | Path, store_dir: str | Path | None = None
) -> ApiMapDatabase:
    """Build the API map from a manifest directory; persist it beside the store.

    An empty directory yields an empty map and the system degrades to
    BM25-only retrieval.
    """
    manifests = load_manifest_dir(manifest_dir)
    db = build_api_map(manifests)
    if store_dir is not None:
        target = Path(store_dir) / LIBRARIES_FILE
        target.parent.mkdir(parents=True, exist_ok=True)
        payload = {"libraries": [manifest_to_dict(m) for m in manifests]}
        target.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return db


def load_api_map(store_dir: str | Path) -> ApiMapDatabase:
    """Load the persisted map from a store directory (empty map if absent)."""
    path = Path(store_dir) / LIBRARIES_FILE
    if not path.exists():
        return ApiMapDatabase()
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        manifests = [manifest_from_dict(m) for m in data["libraries"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ManifestSyntaxError(f"bad libraries file {path}: {exc}") from exc
    return build_api_map(manifests)
