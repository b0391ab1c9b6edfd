"""Command-line shell: pipeline runs, audits, reports, and the HTTP service.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal.
"""
from __future__ import annotations

import json
import logging
import os
import sys

import click
import pandas as pd

from .ingest import (
    RowError,
    SchemaError,
    ValidationError,
    dump_events_jsonl,
    events_frame,
    load_tables,
)
from .metrics import DATASET_COLUMNS, PipelineConfig, build_dataset, write_dataset_csv
from .priority import OverrideError, PriorityConfig, audit_match
from .system import INFERENCE_CONTRACT, SystemConfig, build_bundled_system

log = logging.getLogger(__name__)

DATA_ERRORS = (SchemaError, RowError, ValidationError, OverrideError, FileNotFoundError)


def _pipeline_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    with open(path, encoding="utf-8") as handle:
        return PipelineConfig.from_json(handle.read())


def _priority_config(alpha: float, threshold: float) -> PriorityConfig:
    return PriorityConfig(alpha=alpha, critical_threshold=threshold)


def _run_audits(input_dir, match_ids, pipeline_config, priority_config):
    tables = load_tables(input_dir, match_ids or None)
    dataset = build_dataset(tables, pipeline_config, match_ids or None)
    system = build_bundled_system()
    audits = {}
    for match_id, group in dataset.groupby("matchId", sort=True):
        match = tables.matches.get(match_id)
        audits[int(match_id)] = audit_match(group, match, system, priority_config)
    return tables, dataset, audits


def _run_config(pipeline_config: PipelineConfig, priority_config: PriorityConfig,
                system: SystemConfig) -> dict:
    """Reproducibility record: every tunable parameter behind this run."""
    origins = sorted(system.origins.items())
    return {
        "pipeline": json.loads(pipeline_config.to_json()),
        "priority": {
            "alpha": priority_config.alpha,
            "critical_threshold": priority_config.critical_threshold,
        },
        "inference": {**INFERENCE_CONTRACT,
                      "output_resolution": system.variables[system.output].universe.resolution},
        "system": {
            "output": system.output,
            "anchored_parameters": [key for key, origin in origins if origin == "anchor"],
            "tuned_parameters": [key for key, origin in origins if origin == "tuned"],
        },
    }


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose: bool) -> None:
    """Substitution-priority auditing over soccer event tables."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int, help="Restrict to match ids.")
@click.option("--dump-events", "dump_path", type=click.Path(dir_okay=False),
              help="Write the normalized event stream as JSON lines.")
def ingest(input_dir: str, match_ids: tuple[int, ...], dump_path: str | None) -> None:
    """Parse and normalize the raw tables; optionally dump events."""
    tables = load_tables(input_dir, match_ids or None)
    total = 0
    frames = []
    for match_id in sorted(tables.events):
        frame = events_frame(tables.events[match_id])
        frames.append(frame)
        total += len(frame)
    click.echo(f"matches: {len(tables.matches)}  players: {len(tables.players)}  "
               f"normalized events: {total}")
    if dump_path:
        combined = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        count = dump_events_jsonl(combined, dump_path)
        click.echo(f"wrote {count} events to {dump_path}")


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default="dataset.csv",
              show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Pipeline config JSON (weight table, alpha_net, ...).")
def compute(input_dir: str, match_ids: tuple[int, ...], out_path: str,
            config_path: str | None) -> None:
    """Run the slice pipeline and write the final per-slice dataset."""
    config = _pipeline_config(config_path)
    tables = load_tables(input_dir, match_ids or None)
    dataset = build_dataset(tables, config, match_ids or None)
    write_dataset_csv(dataset, out_path)
    click.echo(f"wrote {len(dataset)} rows x {len(DATASET_COLUMNS)} columns to {out_path}")


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="audits",
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "both"]), default="both",
              show_default=True)
@click.option("--alpha", type=float, default=0.25, show_default=True)
@click.option("--threshold", type=float, default=90.0, show_default=True,
              help="Critical-priority threshold.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def audit(input_dir: str, match_ids: tuple[int, ...], out_dir: str, fmt: str,
          alpha: float, threshold: float, config_path: str | None) -> None:
    """Full audit per match: ranked slices, traces, latency, post-entry."""
    pipeline_config = _pipeline_config(config_path)
    priority_config = _priority_config(alpha, threshold)
    _, _, audits = _run_audits(input_dir, match_ids, pipeline_config, priority_config)
    os.makedirs(out_dir, exist_ok=True)
    run_config = _run_config(pipeline_config, priority_config, build_bundled_system())
    with open(os.path.join(out_dir, "run_config.json"), "w", encoding="utf-8") as handle:
        json.dump(run_config, handle, indent=2)
    for match_id, match_audit in audits.items():
        if fmt in ("json", "both"):
            path = os.path.join(out_dir, f"audit_{match_id}.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(match_audit.to_json())
            click.echo(f"wrote {path}")
        if fmt in ("csv", "both"):
            path = os.path.join(out_dir, f"audit_{match_id}.csv")
            match_audit.to_frame().to_csv(path, index=False)
            click.echo(f"wrote {path}")


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default="latency.csv",
              show_default=True)
@click.option("--alpha", type=float, default=0.25, show_default=True)
@click.option("--threshold", type=float, default=90.0, show_default=True)
def latency(input_dir: str, match_ids: tuple[int, ...], out_path: str,
            alpha: float, threshold: float) -> None:
    """Decision-latency table: first critical slice vs actual substitution."""
    _, _, audits = _run_audits(
        input_dir, match_ids, PipelineConfig(), _priority_config(alpha, threshold)
    )
    rows = []
    for match_id, match_audit in audits.items():
        for entry in match_audit.latency:
            rows.append({"match_id": match_id, **entry.as_dict()})
    frame = pd.DataFrame(rows)
    frame.to_csv(out_path, index=False)
    flagged = frame["latency_minutes"].notna().sum() if len(frame) else 0
    click.echo(f"wrote {len(frame)} latency entries to {out_path} ({flagged} measurable)")


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int)
def report(input_dir: str, match_ids: tuple[int, ...]) -> None:
    """Dataset summary: observation counts, score distribution, role mix."""
    tables = load_tables(input_dir, match_ids or None)
    dataset = build_dataset(tables, PipelineConfig(), match_ids or None)
    click.echo("dataset summary")
    click.echo(f"  observations:   {len(dataset)}")
    click.echo(f"  unique players: {dataset['playerId'].nunique()}")
    click.echo(f"  matches:        {dataset['matchId'].nunique()}")
    percentile = dataset["playerank_acumulativo_media_percentil"]
    click.echo(f"  mean/std cumulative percentile: {percentile.mean():.3f} / {percentile.std():.3f}")
    click.echo("  players per role:")
    per_role = dataset.groupby("player_position")["playerId"].nunique()
    for role, count in per_role.items():
        click.echo(f"    {role:<12} {count}")


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default="timeline.csv",
              show_default=True)
@click.option("--alpha", type=float, default=0.25, show_default=True)
@click.option("--threshold", type=float, default=90.0, show_default=True)
def export(input_dir: str, match_ids: tuple[int, ...], out_path: str,
           alpha: float, threshold: float) -> None:
    """Plot-ready tidy CSV of every per-slice priority value."""
    _, _, audits = _run_audits(
        input_dir, match_ids, PipelineConfig(), _priority_config(alpha, threshold)
    )
    frames = [a.to_frame() for a in audits.values()]
    combined = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    combined.to_csv(out_path, index=False)
    click.echo(f"wrote {len(combined)} timeline rows to {out_path}")


@cli.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--match", "match_ids", multiple=True, type=int)
@click.option("--addr", default=None, help="listen address host:port "
              "(default env SUBAUDIT_ADDR or 127.0.0.1:8000)")
@click.option("--alpha", type=float, default=0.25, show_default=True)
@click.option("--threshold", type=float, default=90.0, show_default=True)
def serve(input_dir: str, match_ids: tuple[int, ...], addr: str | None,
          alpha: float, threshold: float) -> None:
    """Compute audits for the inputs and serve the HTTP API."""
    import uvicorn

    from .service import build_store, create_app

    tables = load_tables(input_dir, match_ids or None)
    dataset = build_dataset(tables, PipelineConfig(), match_ids or None)
    store = build_store(dataset, tables.matches, build_bundled_system(),
                        _priority_config(alpha, threshold))
    app = create_app(store)
    addr = addr or os.environ.get("SUBAUDIT_ADDR", "127.0.0.1:8000")
    host, _, port = addr.partition(":")
    click.echo(f"serving {len(store.audits)} match audits on http://{addr}")
    uvicorn.run(app, host=host, port=int(port or 8000), log_level="info")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except DATA_ERRORS as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        log.exception("internal error")
        click.echo(f"internal error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
