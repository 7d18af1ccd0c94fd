"""Command-line pipeline driver: ingest, build, serve, lineage, gen-corpus.

Exit codes: 0 success, 1 fatal error, 2 not found.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict
from pathlib import Path

import click

from .api import create_app
from .classify import DEFAULT_GAS_THRESHOLD
from .corpus import generate_corpus
from .explorer import ClientConfig, ExplorerClient
from .ingest import Dataset, ValidationError, normalize_address
from .pipeline import build_graph
from .store import CorruptSnapshotError, GraphStore
from .trace import DEFAULT_SIGNATURES, load_signature_table

EXIT_FATAL = 1
EXIT_NOT_FOUND = 2


@click.group()
def main():
    """Track and explore upgradeable smart-contract evolution."""


@main.command()
@click.option("--logs", "logs_file", type=click.Path(), default=None)
@click.option("--creations", "creations_file", type=click.Path(), default=None)
@click.option("--transactions", "transactions_file", type=click.Path(), default=None)
@click.option("--vulns", "vulns_file", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True,
              help="Directory for the normalized dataset.")
def ingest(logs_file, creations_file, transactions_file, vulns_file, out_dir):
    """Parse export files into a normalized dataset directory."""
    dataset = Dataset()
    inputs = [("logs", logs_file), ("creations", creations_file),
              ("transactions", transactions_file), ("vuln_findings", vulns_file)]
    summary = {}
    for kind, path in inputs:
        if path is None:
            continue
        if not Path(path).exists():
            click.echo(f"error: {kind} file not found: {path}", err=True)
            sys.exit(EXIT_FATAL)
        try:
            stats = dataset.ingest_file(path, kind)
        except OSError as exc:
            click.echo(f"error: cannot read {path}: {exc}", err=True)
            sys.exit(EXIT_FATAL)
        summary[kind] = {"read": stats.records_read,
                         "accepted": stats.records_accepted,
                         "rejected": stats.records_rejected}
    dataset.save(out_dir)
    summary["digest"] = dataset.dataset_digest().hex()
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.option("--dataset", "dataset_dir", type=click.Path(), required=True)
@click.option("--snapshot", "snapshot_file", type=click.Path(), required=True)
@click.option("--signatures", "signatures_file", type=click.Path(), default=None)
@click.option("--gas-threshold", type=float, default=DEFAULT_GAS_THRESHOLD,
              show_default=True)
@click.option("--fixtures", "fixture_dir", type=click.Path(), default=None,
              help="Offline verified-source fixture directory.")
@click.option("--jobs", type=int, default=1, show_default=True)
def build(dataset_dir, snapshot_file, signatures_file, gas_threshold,
          fixture_dir, jobs):
    """Detect proxies, trace versions, classify changes, write a snapshot."""
    try:
        dataset = Dataset.load(dataset_dir)
    except (ValidationError, OSError) as exc:
        click.echo(f"error: cannot load dataset: {exc}", err=True)
        sys.exit(EXIT_FATAL)
    signatures = DEFAULT_SIGNATURES
    if signatures_file:
        signatures = load_signature_table(signatures_file)
    explorer = None
    if fixture_dir:
        explorer = ExplorerClient(ClientConfig(offline_fixture_dir=fixture_dir))
    result = build_graph(dataset, signatures=signatures,
                         gas_threshold=gas_threshold, explorer=explorer,
                         jobs=jobs)
    result.store.snapshot(snapshot_file)
    stats = result.store.stats()
    stats["snapshot_digest"] = result.store.digest()
    click.echo(json.dumps(stats, indent=2))


def _load_snapshot_or_exit(snapshot_file) -> GraphStore:
    try:
        return GraphStore.load(snapshot_file)
    except (CorruptSnapshotError, OSError) as exc:
        click.echo(f"error: cannot load snapshot: {exc}", err=True)
        sys.exit(EXIT_FATAL)


@main.command()
@click.option("--snapshot", "snapshot_file", type=click.Path(), required=True)
@click.option("--config", "config_file", type=click.Path(), default=None)
def serve(snapshot_file, config_file):
    """Serve the HTTP API over a snapshot until terminated."""
    import uvicorn

    store = _load_snapshot_or_exit(snapshot_file)
    config = {}
    if config_file:
        try:
            config = json.loads(Path(config_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: cannot load config: {exc}", err=True)
            sys.exit(EXIT_FATAL)
    explorer_cfg = config.get("explorer", {})
    explorer = ExplorerClient(ClientConfig(
        base_url=explorer_cfg.get("base_url", ClientConfig.base_url),
        max_requests_per_second=explorer_cfg.get("max_requests_per_second", 4),
        cache_dir=explorer_cfg.get("cache_dir"),
        offline_fixture_dir=explorer_cfg.get("offline_fixture_dir"),
    ))
    app = create_app(store, explorer=explorer,
                     cors_origin=config.get("cors_origin"))
    host = config.get("listen_host", "127.0.0.1")
    port = int(config.get("listen_port", 8080))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        click.echo(f"error: server failed: {exc}", err=True)
        sys.exit(EXIT_FATAL)


@main.command()
@click.option("--snapshot", "snapshot_file", type=click.Path(), required=True)
@click.option("--address", required=True)
@click.option("--json", "as_json", is_flag=True, default=False)
@click.option("--table", "as_table", is_flag=True, default=False)
def lineage(snapshot_file, address, as_json, as_table):
    """Print the version lineage of one proxy."""
    store = _load_snapshot_or_exit(snapshot_file)
    try:
        address = normalize_address(address)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FATAL)
    result = store.get_lineage(address)
    if not result.found:
        click.echo(f"error: unknown proxy {address}", err=True)
        sys.exit(EXIT_NOT_FOUND)
    if as_json or not as_table:
        payload = {
            "proxy": asdict(result.proxy),
            "versions": [
                {"version": asdict(v), "change": asdict(c) if c else None}
                for v, c in result.items
            ],
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        header = f"{'version':>7}  {'implementation':42}  {'created':>12}  " \
                 f"{'last_tx':>12}  {'tx_count':>8}  categories"
        click.echo(header)
        for version, change in result.items:
            categories = ",".join(change.categories) if change else "-"
            click.echo(
                f"{version.version_number:>7}  {version.contract_address:42}  "
                f"{version.creation_timestamp or '-':>12}  "
                f"{version.last_tx_timestamp or '-':>12}  "
                f"{version.total_transactions:>8}  {categories}")


@main.command("gen-corpus")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--contracts", type=int, default=100, show_default=True)
def gen_corpus(seed, out_dir, contracts):
    """Generate a seeded synthetic corpus with a ground-truth manifest."""
    manifest = generate_corpus(out_dir, seed=seed, contracts=contracts)
    click.echo(json.dumps(manifest["stats"], indent=2))


if __name__ == "__main__":
    main()
