"""Shared vocabulary: API identifiers, libraries, sources, content records, links.

Every other module trades in these value types. They are immutable (or treated
as such) and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from .errors import (
    EmptyQueryError,
    LinkModeViolationError,
    MalformedParamsError,
    QueryParseError,
)


class LinkingMode(str, Enum):
    """How content from a source gets attached to the rest of the system."""

    API_LINKED = "api_linked"
    LIBRARY_LINKED = "library_linked"
    UNLINKED = "unlinked"


class LinkKind(str, Enum):
    API = "api"
    LIBRARY = "library"


class SourceKind(str, Enum):
    """The five supported content sources, in fixed display order."""

    QA_POST = "qa_post"
    CODE_SNIPPET = "code_snippet"
    MICROBLOG = "microblog"
    CVE_ENTRY = "cve_entry"
    VIDEO_METADATA = "video_metadata"

    @property
    def linking_mode(self) -> LinkingMode:
        return _LINKING_MODES[self]

    @property
    def id_prefix(self) -> str:
        """Short prefix used to build stable content ids (`qa:12345`)."""
        return _ID_PREFIXES[self]


_LINKING_MODES = {
    SourceKind.QA_POST: LinkingMode.API_LINKED,
    SourceKind.CODE_SNIPPET: LinkingMode.API_LINKED,
    SourceKind.MICROBLOG: LinkingMode.LIBRARY_LINKED,
    SourceKind.CVE_ENTRY: LinkingMode.LIBRARY_LINKED,
    SourceKind.VIDEO_METADATA: LinkingMode.UNLINKED,
}

_ID_PREFIXES = {
    SourceKind.QA_POST: "qa",
    SourceKind.CODE_SNIPPET: "code",
    SourceKind.MICROBLOG: "mb",
    SourceKind.CVE_ENTRY: "cve",
    SourceKind.VIDEO_METADATA: "video",
}


@dataclass(frozen=True, slots=True)
class ApiIdentifier:
    """Structured name of an API method.

    ``raw`` preserves the original query text and is excluded from equality,
    so a parsed identifier compares equal to its re-parsed rendering.
    """

    package_name: str
    class_name: str
    method_name: str
    parameter_types: tuple[str, ...] = ()
    raw: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.method_name:
            raise ValueError("method_name must be non-empty")
        if self.class_name == "" and self.package_name != "":
            raise ValueError("package_name requires a class_name")

    @property
    def is_fully_qualified(self) -> bool:
        return bool(self.package_name and self.class_name)

    @property
    def simple_name(self) -> str:
        return self.method_name

    def render(self) -> str:
        """Canonical `package.class.method(params)` form; parens always present."""
        parts = [p for p in (self.package_name, self.class_name) if p]
        parts.append(self.method_name)
        return ".".join(parts) + "(" + ",".join(self.parameter_types) + ")"


def parse_api_query(raw: str) -> ApiIdentifier:
    """Parse a query string into an :class:`ApiIdentifier`.

    Grammar: an optional trailing ``(p1,p2,...)`` gives the parameter types;
    the remaining dot-path's last segment is the method name; the segment
    before it, when it starts with an uppercase letter, is the class name;
    anything earlier joins into the package path. A single bare token is a
    simple-name-only identifier. A lowercase pre-method segment means the
    query is treated as unqualified (no package without a class).
    """
    text = raw.strip()
    if not text:
        raise EmptyQueryError("query is empty")

    params: tuple[str, ...] = ()
    if "(" in text or ")" in text:
        open_idx = text.find("(")
        if (
            text.count("(") != 1
            or text.count(")") != 1
            or not text.endswith(")")
            or open_idx == -1
        ):
            raise MalformedParamsError(f"unbalanced parentheses in {raw!r}")
        inner = text[open_idx + 1 : -1]
        params = tuple(p.strip() for p in inner.split(",") if p.strip())
        text = text[:open_idx].strip()

    if not text:
        raise QueryParseError(f"no method name in {raw!r}")
    segments = text.split(".")
    if any(not s for s in segments):
        raise QueryParseError(f"empty path segment in {raw!r}")

    method = segments[-1]
    class_name = ""
    package = ""
    if len(segments) > 1 and segments[-2][0].isupper():
        class_name = segments[-2]
        package = ".".join(segments[:-2])
    return ApiIdentifier(
        package_name=package,
        class_name=class_name,
        method_name=method,
        parameter_types=params,
        raw=raw,
    )


def simple_name(api: ApiIdentifier) -> str:
    """The bare method name, the ambiguity-prone currency of API mentions."""
    return api.method_name


@dataclass(frozen=True, slots=True)
class LibraryRef:
    """A distributable library that exports public APIs."""

    library_id: str
    display_name: str = ""
    aliases: frozenset[str] = frozenset()
    ecosystem: str = ""

    def __post_init__(self) -> None:
        if not self.library_id:
            raise ValueError("library_id must be non-empty")
        if self.library_id in self.aliases:
            raise ValueError("aliases must not repeat the library_id")

    @property
    def names(self) -> frozenset[str]:
        """All strings this library may be mentioned by in running text."""
        names = {self.library_id, *self.aliases}
        if self.display_name:
            names.add(self.display_name)
        return frozenset(names)


@dataclass(frozen=True, slots=True)
class Link:
    """A confidence-scored connection from a content record to an API or library."""

    target: ApiIdentifier | str
    confidence: float
    linker_id: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if not self.linker_id:
            raise ValueError("linker_id must be non-empty")

    @property
    def kind(self) -> LinkKind:
        return LinkKind.API if isinstance(self.target, ApiIdentifier) else LinkKind.LIBRARY

    @property
    def target_key(self) -> str:
        """Rendered target string used as the lookup key in the link index."""
        if isinstance(self.target, ApiIdentifier):
            return self.target.render()
        return self.target


_LINK_KIND_FOR_MODE = {
    LinkingMode.API_LINKED: LinkKind.API,
    LinkingMode.LIBRARY_LINKED: LinkKind.LIBRARY,
}


@dataclass(frozen=True, slots=True)
class ContentRecord:
    """One ingested item from any source, plus its attached links."""

    content_id: str
    source: SourceKind
    title: str = ""
    body: str = ""
    url: str = ""
    metadata: Mapping[str, str] = field(default_factory=dict)
    links: tuple[Link, ...] = ()

    def validate(self) -> None:
        """Raise if the record violates its invariants (used at store insertion)."""
        if not self.content_id:
            raise ValueError("content_id must be non-empty")
        if not self.title and not self.body:
            raise ValueError(f"{self.content_id}: title and body both empty")
        mode = self.source.linking_mode
        expected = _LINK_KIND_FOR_MODE.get(mode)
        for link in self.links:
            if expected is None:
                raise LinkModeViolationError(
                    f"{self.content_id}: {self.source.value} records carry no links"
                )
            if link.kind is not expected:
                raise LinkModeViolationError(
                    f"{self.content_id}: {link.kind.value} link not allowed on "
                    f"{mode.value} source {self.source.value}"
                )

    def text(self) -> str:
        """Title and body joined for tokenization and matching."""
        if self.title and self.body:
            return self.title + "\n" + self.body
        return self.title or self.body


def link_to_dict(link: Link) -> dict[str, Any]:
    return {
        "kind": link.kind.value,
        "target": link.target_key,
        "confidence": link.confidence,
        "linker_id": link.linker_id,
    }


def link_from_dict(data: Mapping[str, Any]) -> Link:
    kind = LinkKind(data["kind"])
    target: ApiIdentifier | str
    if kind is LinkKind.API:
        target = parse_api_query(data["target"])
    else:
        target = data["target"]
    return Link(target=target, confidence=data["confidence"], linker_id=data["linker_id"])


def record_to_dict(record: ContentRecord) -> dict[str, Any]:
    return {
        "content_id": record.content_id,
        "source": record.source.value,
        "title": record.title,
        "body": record.body,
        "url": record.url,
        "metadata": dict(record.metadata),
        "links": [link_to_dict(l) for l in record.links],
    }


def record_from_dict(data: Mapping[str, Any]) -> ContentRecord:
    return ContentRecord(
        content_id=data["content_id"],
        source=SourceKind(data["source"]),
        title=data.get("title", ""),
        body=data.get("body", ""),
        url=data.get("url", ""),
        metadata=dict(data.get("metadata", {})),
        links=tuple(link_from_dict(l) for l in data.get("links", ())),
    )
