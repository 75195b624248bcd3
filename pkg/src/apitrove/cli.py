"""Command-line interface: ingest, register-libs, serve, search, compact."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .engine import retrieve
from .errors import ApitroveError, QueryParseError, StorageFailureError
from .linkers import LinkerConfig, load_linker_config
from .model import SourceKind
from .pipeline import ingest_path, load_api_map, parse_source_kind, register_libraries
from .service import DISPLAY_NAMES, ServiceConfig, create_app, format_score
from .store import ContentStore

_SOURCE_NAMES = [s.value for s in SourceKind]


@click.group()
def main() -> None:
    """Harvest API information from heterogeneous sources and search it."""


@main.command()
@click.option("--source", "source_name", required=True, type=click.Choice(_SOURCE_NAMES))
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--linker-config", type=click.Path(exists=True, dir_okay=False))
@click.option("--keep-rejected", type=click.Path(dir_okay=False))
def ingest(source_name, input_path, store_dir, linker_config, keep_rejected) -> None:
    """Ingest one record file for one source into the store."""
    source = parse_source_kind(source_name)
    config = load_linker_config(linker_config) if linker_config else LinkerConfig()
    try:
        db = load_api_map(store_dir)
        with ContentStore.open(store_dir, create=True) as store:
            if keep_rejected:
                with open(keep_rejected, "w", encoding="utf-8") as sink:
                    report = ingest_path(
                        source, input_path, db, store, config=config, rejected_sink=sink
                    )
            else:
                report = ingest_path(source, input_path, db, store, config=config)
    except ApitroveError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"{source.value}: read={report.read_count} linked={report.linked_count} "
        f"stored={report.stored_count} rejected={report.rejected_count} "
        f"malformed={report.malformed_count}"
    )
    for where, reason in report.errors:
        click.echo(f"  skipped {where}: {reason}", err=True)


@main.command("register-libs")
@click.option("--manifests", "manifest_dir", required=True, type=click.Path(file_okay=False, exists=True))
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
def register_libs(manifest_dir, store_dir) -> None:
    """Load library manifests and persist the API map beside the store."""
    try:
        db = register_libraries(manifest_dir, store_dir)
    except ApitroveError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"registered {len(db.libraries)} libraries, {len(db.by_fqn)} signatures")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
def serve(config_path) -> None:
    """Run the HTTP search service."""
    import uvicorn

    config = ServiceConfig.from_json(config_path)
    try:
        app = create_app(config)
    except ApitroveError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=config.host, port=config.port)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
@click.option("--api", "query", required=True)
@click.option("--k", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--strict", is_flag=True, help="Disable BM25 fallback for link-backed sources.")
def search(store_dir, query, k, strict) -> None:
    """Search the store offline and print per-source result sections."""
    try:
        store = ContentStore.open(store_dir)
        db = load_api_map(store_dir)
    except ApitroveError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    try:
        result = retrieve(query, store, db, k, strict=strict)
    except QueryParseError as exc:
        click.echo(f"query error: {exc}", err=True)
        sys.exit(2)
    finally:
        store.close()

    if result.resolved_libraries:
        libs = ", ".join(l.library_id for l in result.resolved_libraries)
        click.echo(f"libraries: {libs}")
    for source in SourceKind:
        click.echo(f"=== {DISPLAY_NAMES[source]} ({source.value}) ===")
        items = result.per_source[source]
        if not items:
            click.echo("  (no results)")
            continue
        for rank, item in enumerate(items, start=1):
            title = item.record.title or item.record.content_id
            click.echo(
                f"  {rank}. [{item.mode.value}] {format_score(item.score):.4f} "
                f"{title} <{item.record.url}>"
            )


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False, exists=True))
def compact(store_dir) -> None:
    """Rewrite the content log, dropping superseded record versions."""
    try:
        with ContentStore.open(store_dir) as store:
            store.compact()
            count = store.count()
    except StorageFailureError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"compacted store with {count} records")


if __name__ == "__main__":
    main()
