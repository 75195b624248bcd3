"""Heuristic linkers that decide whether content mentions an API or library.

Each source kind gets one linker behind a uniform contract: a content record
goes in, a list of confidence-scored links comes out. The scorers are
transparent lexical heuristics with documented weights; thresholds, weights,
and the software-context cue lexicon all live in :class:`LinkerConfig` so a
deployment can swap or retune a linker without touching the pipeline.

Linkers are pure functions of (record, map database, configuration): the same
inputs always produce the same links, ordered by descending confidence with
ties broken on the rendered target.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .apimap import ApiMapDatabase
from .errors import ManifestSyntaxError, SourceMismatchError
from .model import (
    ApiIdentifier,
    LibraryRef,
    Link,
    LinkKind,
    LinkingMode,
    SourceKind,
    parse_api_query,
)

DEFAULT_CUES: tuple[str, ...] = (
    "release",
    "bug",
    "vulnerability",
    "version",
    "CVE",
    "API",
    "library",
    "update",
    "deprecat",
)

# Weight sums like 0.4 + 0.3 + 0.2 + 0.1 drift in binary floating point;
# quantizing keeps threshold comparisons and reported confidences exact.
_SCORE_DECIMALS = 4

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_IMPORT_RE = re.compile(r"^\s*import\s+(?:static\s+)?([A-Za-z_][\w.]*?)(?:\.\*)?\s*;?\s*$")
_CALL_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(")
_NOT_CALLS = frozenset(
    {"if", "for", "while", "switch", "catch", "return", "new", "throw", "synchronized"}
)


@dataclass(frozen=True, slots=True)
class LinkerDescriptor:
    """Identity and gating threshold of one linker."""

    linker_id: str
    supported_source: SourceKind
    produces: LinkKind
    threshold: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        mode = self.supported_source.linking_mode
        expected = {
            LinkingMode.API_LINKED: LinkKind.API,
            LinkingMode.LIBRARY_LINKED: LinkKind.LIBRARY,
        }.get(mode)
        if expected is not self.produces:
            raise ValueError(
                f"linker for {self.supported_source.value} must produce "
                f"{expected.value if expected else 'no'} links"
            )


@dataclass(frozen=True, slots=True)
class CodeFacts:
    """Imports and call sites extracted from a code snippet."""

    imports: tuple[str, ...]
    invocations: tuple[tuple[str, int], ...]


@dataclass(frozen=True, slots=True)
class CodeLinkWeights:
    arity_match: float = 0.5
    import_prefix: float = 0.4
    class_token: float = 0.1


@dataclass(frozen=True, slots=True)
class PostLinkWeights:
    simple_name_in_code: float = 0.4
    class_anywhere: float = 0.3
    package_or_library: float = 0.2
    qualified_call: float = 0.1


@dataclass(frozen=True, slots=True)
class TextLinkWeights:
    name_match: float = 0.6
    context_cue: float = 0.4
    cve_name_match: float = 0.8
    cve_product_match: float = 0.2


# Default minimum confidences. The microblog threshold sits above the bare
# name-match weight so that a library name with no software-context cue
# ("I love guava smoothies") never links on its own.
DEFAULT_THRESHOLDS = {
    SourceKind.QA_POST: 0.5,
    SourceKind.CODE_SNIPPET: 0.5,
    SourceKind.MICROBLOG: 0.7,
    SourceKind.CVE_ENTRY: 0.8,
}

DEFAULT_LINKER_IDS = {
    SourceKind.QA_POST: "post-lexical",
    SourceKind.CODE_SNIPPET: "code-import-arity",
    SourceKind.MICROBLOG: "tweet-library-mention",
    SourceKind.CVE_ENTRY: "cve-library-mention",
}


def default_descriptor(source: SourceKind) -> LinkerDescriptor:
    produces = (
        LinkKind.API
        if source.linking_mode is LinkingMode.API_LINKED
        else LinkKind.LIBRARY
    )
    return LinkerDescriptor(
        linker_id=DEFAULT_LINKER_IDS[source],
        supported_source=source,
        produces=produces,
        threshold=DEFAULT_THRESHOLDS[source],
    )


@dataclass(frozen=True, slots=True)
class LinkerConfig:
    """Per-source descriptors, scoring weights, and the cue lexicon."""

    descriptors: dict[SourceKind, LinkerDescriptor] = field(
        default_factory=lambda: {
            s: default_descriptor(s)
            for s in SourceKind
            if s.linking_mode is not LinkingMode.UNLINKED
        }
    )
    code_weights: CodeLinkWeights = CodeLinkWeights()
    post_weights: PostLinkWeights = PostLinkWeights()
    text_weights: TextLinkWeights = TextLinkWeights()
    cues: tuple[str, ...] = DEFAULT_CUES


def load_linker_config(path: str | Path) -> LinkerConfig:
    """Read threshold/weight/cue overrides from a JSON document.

    The document may carry ``thresholds`` (source kind -> float), ``cues``
    (list of strings), and ``weights`` with optional ``code``/``post``/``text``
    objects whose keys override the matching weight fields.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestSyntaxError(f"bad linker config {path}: {exc}") from exc
    config = LinkerConfig()
    if "thresholds" in data:
        descriptors = dict(config.descriptors)
        for kind_name, threshold in data["thresholds"].items():
            kind = SourceKind(kind_name)
            descriptors[kind] = replace(descriptors[kind], threshold=float(threshold))
        config = replace(config, descriptors=descriptors)
    if "cues" in data:
        config = replace(config, cues=tuple(str(c) for c in data["cues"]))
    weights = data.get("weights", {})
    if "code" in weights:
        config = replace(config, code_weights=replace(config.code_weights, **weights["code"]))
    if "post" in weights:
        config = replace(config, post_weights=replace(config.post_weights, **weights["post"]))
    if "text" in weights:
        config = replace(config, text_weights=replace(config.text_weights, **weights["text"]))
    return config


def _require_source(record, expected: SourceKind) -> None:
    if record.source is not expected:
        raise SourceMismatchError(
            f"{record.content_id}: expected {expected.value}, got {record.source.value}"
        )


def _identifier_tokens(text: str) -> set[str]:
    return set(_IDENT_RE.findall(text))


def _word_pattern(name: str) -> re.Pattern[str]:
    return re.compile(rf"(?<!\w){re.escape(name)}(?!\w)", re.IGNORECASE)


def _name_mentioned(library: LibraryRef, text: str) -> bool:
    return any(_word_pattern(name).search(text) for name in library.names)


# -- code snippets ----------------------------------------------------------


def extract_code_facts(code: str) -> CodeFacts:
    """Pull import dot-paths and (callee, argument count) pairs from a snippet.

    Argument counts come from top-level commas inside the call's parentheses;
    calls whose parentheses never close are dropped rather than guessed.
    """
    imports = []
    for line in code.splitlines():
        match = _IMPORT_RE.match(line)
        if match:
            path = match.group(1).rstrip(".")
            if path and all(seg for seg in path.split(".")):
                imports.append(path)

    invocations = []
    for match in _CALL_RE.finditer(code):
        name = match.group(1)
        if name in _NOT_CALLS:
            continue
        argc = _count_arguments(code, match.end() - 1)
        if argc is not None:
            invocations.append((name, argc))
    return CodeFacts(imports=tuple(imports), invocations=tuple(invocations))


def _count_arguments(code: str, open_paren: int) -> int | None:
    depth = 0
    commas = 0
    saw_content = False
    for ch in code[open_paren:]:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth == 0:
                return commas + 1 if saw_content or commas else 0
        elif ch == "," and depth == 1:
            commas += 1
        elif depth >= 1 and not ch.isspace():
            saw_content = True
    return None


def link_code_snippet(
    record,
    db: ApiMapDatabase,
    desc: LinkerDescriptor,
    weights: CodeLinkWeights = CodeLinkWeights(),
) -> list[Link]:
    """Link a code snippet to API signatures via imports, arity, and class tokens.

    Each call site whose callee matches a mapped simple name scores its
    candidates: the arity weight when argument counts agree (a candidate with
    an empty parameter list counts as unknown arity and matches any call),
    the import weight when an import dot-path prefixes the candidate's
    package.class, and the class-token weight when the candidate's class name
    occurs as an identifier in the snippet.
    """
    _require_source(record, SourceKind.CODE_SNIPPET)
    facts = extract_code_facts(record.body)
    snippet_tokens = _identifier_tokens(record.body)

    best: dict[str, tuple[float, ApiIdentifier]] = {}
    for name, argc in facts.invocations:
        for _lib, fqn in db.by_simple_name.get(name, ()):
            api = parse_api_query(fqn)
            score = 0.0
            arity = len(api.parameter_types)
            if arity == argc or arity == 0:
                score += weights.arity_match
            package_class = f"{api.package_name}.{api.class_name}"
            if any(_dot_prefixed(imp, package_class) for imp in facts.imports):
                score += weights.import_prefix
            if api.class_name and api.class_name in snippet_tokens:
                score += weights.class_token
            score = min(round(score, _SCORE_DECIMALS), 1.0)
            current = best.get(fqn)
            if current is None or score > current[0]:
                best[fqn] = (score, api)

    links = [
        Link(target=api, confidence=score, linker_id=desc.linker_id)
        for score, api in best.values()
        if score >= desc.threshold
    ]
    return _sorted_links(links)


def _dot_prefixed(import_path: str, package_class: str) -> bool:
    if import_path == package_class:
        return True
    return package_class.startswith(import_path + ".") or import_path.startswith(
        package_class + "."
    )


# -- question/answer posts ---------------------------------------------------


def code_regions(body: str) -> list[str]:
    """Backtick-delimited spans plus lines indented by four or more spaces."""
    regions = []
    parts = body.split("`")
    regions.extend(part for i, part in enumerate(parts) if i % 2 == 1 and part)
    for line in body.splitlines():
        if line.startswith("    ") and line.strip():
            regions.append(line)
    return regions


def link_post(
    record,
    db: ApiMapDatabase,
    desc: LinkerDescriptor,
    weights: PostLinkWeights = PostLinkWeights(),
) -> list[Link]:
    """Link a Q&A post to API signatures via lexical evidence.

    A post is a candidate only when its text carries a token equal to some
    mapped simple name. Evidence then accumulates per candidate signature:
    the simple name inside a code region, the class name anywhere in the
    text, the package path or owning library's name, and the qualified
    ``Class.method`` form. Class and qualified-call checks are case-sensitive
    substring matches so that near-miss spellings still count as class
    evidence without counting as a qualified call.
    """
    _require_source(record, SourceKind.QA_POST)
    text = record.text()
    tokens = _identifier_tokens(text)
    matched_names = tokens & db.by_simple_name.keys()
    if not matched_names:
        return []

    region_tokens = _identifier_tokens("\n".join(code_regions(record.body)))

    best: dict[str, tuple[float, ApiIdentifier]] = {}
    for name in matched_names:
        for lib_id, fqn in db.by_simple_name[name]:
            api = parse_api_query(fqn)
            library = db.libraries[lib_id]
            score = 0.0
            if api.method_name in region_tokens:
                score += weights.simple_name_in_code
            if api.class_name and api.class_name in text:
                score += weights.class_anywhere
            package_hit = bool(api.package_name) and api.package_name in text
            library_hit = _library_name_mentioned(library, text)
            if package_hit or library_hit:
                score += weights.package_or_library
            if api.class_name and f"{api.class_name}.{api.method_name}" in text:
                score += weights.qualified_call
            score = min(round(score, _SCORE_DECIMALS), 1.0)
            current = best.get(fqn)
            if current is None or score > current[0]:
                best[fqn] = (score, api)

    links = [
        Link(target=api, confidence=score, linker_id=desc.linker_id)
        for score, api in best.values()
        if score >= desc.threshold
    ]
    return _sorted_links(links)


def _library_name_mentioned(library: LibraryRef, text: str) -> bool:
    names = {library.display_name, *library.aliases}
    return any(_word_pattern(name).search(text) for name in names if name)


# -- library mentions in plain text (microblogs, CVE entries) ----------------


def link_library_text(
    record,
    libraries: Sequence[LibraryRef],
    desc: LinkerDescriptor,
    weights: TextLinkWeights = TextLinkWeights(),
    cues: Iterable[str] = DEFAULT_CUES,
) -> list[Link]:
    """Link free-form text to libraries by name mention.

    Microblogs need a software-context cue on top of the name match to clear
    the default threshold, encoding the "guava the fruit vs Guava the
    library" ambiguity. CVE descriptions are already software context, so a
    name match scores high immediately and an affected-product metadata match
    adds the rest.
    """
    if record.source not in (SourceKind.MICROBLOG, SourceKind.CVE_ENTRY):
        raise SourceMismatchError(
            f"{record.content_id}: expected microblog or cve_entry, got {record.source.value}"
        )
    _require_source(record, desc.supported_source)
    text = record.text()

    links = []
    for library in libraries:
        if record.source is SourceKind.MICROBLOG:
            score = 0.0
            if _name_mentioned(library, text):
                score += weights.name_match
                if _has_cue(text, cues):
                    score += weights.context_cue
        else:
            score = 0.0
            if _name_mentioned(library, text):
                score += weights.cve_name_match
            products = record.metadata.get("affected_products", "")
            if products and _name_mentioned(library, products):
                score += weights.cve_product_match
        score = min(round(score, _SCORE_DECIMALS), 1.0)
        if score >= desc.threshold:
            links.append(
                Link(target=library.library_id, confidence=score, linker_id=desc.linker_id)
            )
    return _sorted_links(links)


def _has_cue(text: str, cues: Iterable[str]) -> bool:
    # Cues are stems: "deprecat" must match "deprecated" and "deprecation".
    return any(
        re.search(rf"(?<!\w){re.escape(cue)}", text, re.IGNORECASE) for cue in cues
    )


def _sorted_links(links: list[Link]) -> list[Link]:
    return sorted(links, key=lambda l: (-l.confidence, l.target_key))


def run_linker(record, db: ApiMapDatabase, config: LinkerConfig) -> list[Link] | None:
    """Dispatch a record to its source's linker; ``None`` for unlinked sources."""
    source = record.source
    if source.linking_mode is LinkingMode.UNLINKED:
        return None
    desc = config.descriptors[source]
    if source is SourceKind.QA_POST:
        return link_post(record, db, desc, config.post_weights)
    if source is SourceKind.CODE_SNIPPET:
        return link_code_snippet(record, db, desc, config.code_weights)
    return link_library_text(
        record, db.library_refs(), desc, config.text_weights, config.cues
    )
