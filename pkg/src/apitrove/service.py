"""HTTP service exposing search and content endpoints for the web UI.

All handlers are read-only; ingestion happens through the CLI before the
service starts (data preparation and deployment are separate phases).
Responses are pure functions of the opened store and the request, with fixed
field order and scores formatted to four decimal places, so a recorded
request suite replays byte-identically against an unchanged store.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .apimap import ApiMapDatabase
from .engine import AggregatedResult, retrieve
from .errors import QueryParseError, StorageFailureError
from .model import ContentRecord, SourceKind, record_to_dict
from .pipeline import load_api_map
from .store import ContentStore, tokenize

SNIPPET_LENGTH = 200

DISPLAY_NAMES = {
    SourceKind.QA_POST: "StackOverflow",
    SourceKind.CODE_SNIPPET: "GitHub",
    SourceKind.MICROBLOG: "Tweet",
    SourceKind.CVE_ENTRY: "CVE",
    SourceKind.VIDEO_METADATA: "YouTube",
}


@dataclass(slots=True)
class ServiceConfig:
    store_dir: Path
    host: str = "127.0.0.1"
    port: int = 8080
    default_k: int = 100
    strict_mode: bool = False
    static_dir: Path | None = None

    def __post_init__(self) -> None:
        if self.default_k < 1:
            raise ValueError("default_k must be >= 1")

    @classmethod
    def from_json(cls, path: str | Path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        static = data.get("static_dir")
        return cls(
            store_dir=Path(data["store_dir"]),
            host=data.get("host", "127.0.0.1"),
            port=int(data.get("port", 8080)),
            default_k=int(data.get("default_k", 100)),
            strict_mode=bool(data.get("strict_mode", False)),
            static_dir=Path(static) if static else None,
        )


def format_score(score: float) -> float:
    """Stable four-decimal score formatting shared by HTTP and CLI output."""
    return float(f"{score:.4f}")


def make_snippet(body: str, query: str) -> str:
    """First ``SNIPPET_LENGTH`` characters of the body with query tokens marked."""
    snippet = body[:SNIPPET_LENGTH]
    tokens = sorted({t for t in tokenize(query) if "." not in t}, key=len, reverse=True)
    if not tokens:
        return snippet
    pattern = re.compile(
        r"(?<!\w)(" + "|".join(re.escape(t) for t in tokens) + r")(?!\w)",
        re.IGNORECASE,
    )
    return pattern.sub(r"**\1**", snippet)


def search_payload(result: AggregatedResult, raw_query: str) -> dict[str, Any]:
    results: dict[str, Any] = {}
    for source in SourceKind:
        entries = []
        for item in result.per_source[source]:
            entries.append(
                {
                    "source": source.value,
                    "mode": item.mode.value,
                    "score": format_score(item.score),
                    "content_id": item.record.content_id,
                    "title": item.record.title,
                    "url": item.record.url,
                    "snippet": make_snippet(item.record.body, raw_query),
                }
            )
        results[source.value] = entries
    return {
        "query": raw_query,
        "resolved_libraries": [
            {"library_id": lib.library_id, "display_name": lib.display_name}
            for lib in result.resolved_libraries
        ],
        "results": results,
    }


def content_payload(record: ContentRecord) -> dict[str, Any]:
    payload = record_to_dict(record)
    payload["source_display_name"] = DISPLAY_NAMES[record.source]
    return payload


def create_app(
    config: ServiceConfig,
    store: ContentStore | None = None,
    map_db: ApiMapDatabase | None = None,
) -> FastAPI:
    """Build the application; opens the store unless one is injected."""
    if store is None:
        store = ContentStore.open(config.store_dir)
    if map_db is None:
        map_db = load_api_map(config.store_dir)

    app = FastAPI(title="apitrove", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.map_db = map_db

    @app.exception_handler(StorageFailureError)
    async def storage_failure(_, exc: StorageFailureError) -> JSONResponse:
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.get("/api/sources")
    def sources() -> list[dict[str, str]]:
        return [
            {
                "source": s.value,
                "display_name": DISPLAY_NAMES[s],
                "linking_mode": s.linking_mode.value,
            }
            for s in SourceKind
        ]

    @app.get("/api/search")
    def search(api: str = Query(""), k: int | None = Query(None, ge=1)):
        effective_k = k if k is not None else config.default_k
        try:
            result = retrieve(
                api, store, map_db, effective_k, strict=config.strict_mode
            )
        except QueryParseError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return search_payload(result, api)

    @app.get("/api/content/{content_id}")
    def content(content_id: str):
        record = store.get(content_id)
        if record is None:
            return JSONResponse(
                status_code=404, content={"error": f"unknown content_id {content_id!r}"}
            )
        return content_payload(record)

    if config.static_dir is not None:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
