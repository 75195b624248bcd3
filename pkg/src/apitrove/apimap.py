"""API map: library manifests and the API-to-library lookup database.

Library manifests are declarative JSON documents listing every public API a
library exports as a fully-qualified signature. The map database built from
them answers "which library does this API belong to" for the retrieval
engine, keeping a simple-name projection alongside the exact-signature index
so that unqualified queries can fan out to every matching candidate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Mapping

from .errors import (
    DuplicateLibraryIdError,
    DuplicateSignatureError,
    ManifestSyntaxError,
    QueryParseError,
)
from .model import ApiIdentifier, LibraryRef, parse_api_query


@dataclass(frozen=True, slots=True)
class LibraryManifest:
    """One library plus the fully-qualified signatures it exports."""

    library: LibraryRef
    apis: tuple[ApiIdentifier, ...]


@dataclass(slots=True)
class ApiMapDatabase:
    """Signature-to-library index plus its simple-name projection.

    ``by_simple_name`` is always exactly the projection of ``by_fqn``; both
    are built once and never mutated afterwards, so the database is safe for
    unlimited concurrent readers.
    """

    libraries: dict[str, LibraryRef] = field(default_factory=dict)
    by_fqn: dict[str, set[str]] = field(default_factory=dict)
    by_simple_name: dict[str, set[tuple[str, str]]] = field(default_factory=dict)

    def library_refs(self) -> list[LibraryRef]:
        """All registered libraries, ordered by library_id."""
        return [self.libraries[i] for i in sorted(self.libraries)]

    def is_empty(self) -> bool:
        return not self.libraries


def load_library_manifest(source: IO[bytes] | IO[str] | bytes | str) -> LibraryManifest:
    """Parse one manifest document (see README for the file format).

    Raises :class:`ManifestSyntaxError` for malformed documents and
    :class:`DuplicateSignatureError` when the same signature is listed twice.
    """
    if hasattr(source, "read"):
        raw = source.read()  # type: ignore[union-attr]
    else:
        raw = source
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ManifestSyntaxError(f"manifest is not valid UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ManifestSyntaxError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ManifestSyntaxError("manifest must be a JSON object")
    return manifest_from_dict(data)


def manifest_from_dict(data: Mapping[str, Any]) -> LibraryManifest:
    library_id = data.get("library_id")
    if not isinstance(library_id, str) or not library_id:
        raise ManifestSyntaxError("library_id must be a non-empty string")
    display_name = data.get("display_name", library_id)
    aliases = data.get("aliases", [])
    ecosystem = data.get("ecosystem", "")
    if not isinstance(aliases, list) or not all(isinstance(a, str) for a in aliases):
        raise ManifestSyntaxError(f"{library_id}: aliases must be a list of strings")
    if library_id in aliases:
        raise ManifestSyntaxError(f"{library_id}: aliases must not repeat the library_id")

    apis_raw = data.get("apis")
    if not isinstance(apis_raw, list) or not apis_raw:
        raise ManifestSyntaxError(f"{library_id}: apis must be a non-empty list")

    apis: list[ApiIdentifier] = []
    seen: set[str] = set()
    for entry in apis_raw:
        if not isinstance(entry, str):
            raise ManifestSyntaxError(f"{library_id}: api entries must be strings")
        try:
            api = parse_api_query(entry)
        except QueryParseError as exc:
            raise ManifestSyntaxError(f"{library_id}: bad signature {entry!r}: {exc}") from exc
        if not api.is_fully_qualified:
            raise ManifestSyntaxError(
                f"{library_id}: signature {entry!r} is not fully qualified"
            )
        fqn = api.render()
        if fqn in seen:
            raise DuplicateSignatureError(f"{library_id}: duplicate signature {fqn}")
        seen.add(fqn)
        apis.append(api)

    library = LibraryRef(
        library_id=library_id,
        display_name=display_name,
        aliases=frozenset(aliases),
        ecosystem=ecosystem,
    )
    return LibraryManifest(library=library, apis=tuple(apis))


def manifest_to_dict(manifest: LibraryManifest) -> dict[str, Any]:
    return {
        "library_id": manifest.library.library_id,
        "display_name": manifest.library.display_name,
        "aliases": sorted(manifest.library.aliases),
        "ecosystem": manifest.library.ecosystem,
        "apis": [api.render() for api in manifest.apis],
    }


def build_api_map(manifests: Iterable[LibraryManifest]) -> ApiMapDatabase:
    """Build the lookup database; the result is independent of manifest order."""
    db = ApiMapDatabase()
    for manifest in manifests:
        lib_id = manifest.library.library_id
        if lib_id in db.libraries:
            raise DuplicateLibraryIdError(f"library_id {lib_id!r} registered twice")
        db.libraries[lib_id] = manifest.library
        for api in manifest.apis:
            fqn = api.render()
            db.by_fqn.setdefault(fqn, set()).add(lib_id)
            db.by_simple_name.setdefault(api.method_name, set()).add((lib_id, fqn))
    return db


def lookup_candidates(api: ApiIdentifier, db: ApiMapDatabase) -> list[tuple[str, str]]:
    """All (library_id, fqn) pairs the query may refer to, sorted.

    Fully-qualified queries match exactly; a fully-qualified query with an
    empty parameter list falls back to any arity of the same
    package.class.method when no exact signature exists (users routinely omit
    parameters). Simple-name queries fan out to every signature sharing the
    method name; a class-qualified but package-less query narrows that fan-out
    to signatures on the named class.
    """
    if api.is_fully_qualified:
        fqn = api.render()
        libs = db.by_fqn.get(fqn)
        if libs:
            return sorted((lib, fqn) for lib in libs)
        if not api.parameter_types:
            prefix = f"{api.package_name}.{api.class_name}.{api.method_name}("
            return sorted(
                (lib, f)
                for f, lib_ids in db.by_fqn.items()
                if f.startswith(prefix)
                for lib in lib_ids
            )
        return []

    pairs = db.by_simple_name.get(api.method_name, set())
    if api.class_name:
        if api.parameter_types:
            suffix = f".{api.class_name}.{api.method_name}({','.join(api.parameter_types)})"
            return sorted(p for p in pairs if p[1].endswith(suffix))
        marker = f".{api.class_name}.{api.method_name}("
        return sorted(p for p in pairs if marker in p[1])
    return sorted(pairs)


def lookup_library(api: ApiIdentifier, db: ApiMapDatabase) -> list[LibraryRef]:
    """Libraries the queried API belongs to, sorted by library_id.

    Unknown APIs yield an empty list; downstream retrieval then degrades to
    BM25-only behavior rather than failing.
    """
    lib_ids = sorted({lib for lib, _ in lookup_candidates(api, db)})
    return [db.libraries[i] for i in lib_ids]
