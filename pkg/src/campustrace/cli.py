"""Command-line interface.

Mirrors the HTTP endpoints for fully offline use: ingest, analyze,
trace, simulate, export, plus a synthetic-data generator, a one-shot
``report`` that writes the delimited outputs together with rendered
figures, and ``serve`` to start the HTTP service.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from datetime import date as date_type, datetime, time as time_type
from pathlib import Path

import click

from . import exporters, figures, synthdata
from .epidemic import EpidemicParams, EpidemicState, mu_sweep, simulate
from .pipeline import (
    ingest_takeout_file,
    report_for,
    run_analysis,
    scores_for,
    trace_for,
)
from .proximity import ProximityConfig
from .store import TrajectoryStore
from .takeout import parse_activity_segments
from .timeutil import iso_utc
from .tracing import screening_order


@click.group()
def main():
    """Campus contact tracing from location-history exports."""


def _config_options(fn):
    fn = click.option("--start-date", required=True, type=click.DateTime(["%Y-%m-%d"]), help="Analysis window start date (UTC).")(fn)
    fn = click.option("--start-time", default="00:00:00", show_default=True, help="Window start time of day.")(fn)
    fn = click.option("--window-days", default=14, show_default=True, type=int)(fn)
    fn = click.option("--step-s", default=60, show_default=True, type=int, help="Grid interval in seconds.")(fn)
    fn = click.option("--collision-distance-m", default=1.0, show_default=True, type=float)(fn)
    fn = click.option("--collision-interval-s", default=300, show_default=True, type=int)(fn)
    fn = click.option("--index-user", default=None, help="Restrict detection to pairs with this user.")(fn)
    fn = click.option("--max-gap-s", default=600, show_default=True, type=int, help="Interpolation gap limit.")(fn)
    fn = click.option("--cell-m", default=10.0, show_default=True, type=float, help="Site grid cell size.")(fn)
    return fn


def _build_config(start_date, start_time, window_days, step_s, collision_distance_m, collision_interval_s, index_user) -> ProximityConfig:
    return ProximityConfig(
        start_date=start_date.date() if isinstance(start_date, datetime) else start_date,
        start_time=time_type.fromisoformat(start_time),
        window_days=window_days,
        step_s=step_s,
        collision_distance_m=collision_distance_m,
        collision_interval_s=collision_interval_s,
        index_user=index_user,
    )


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--users", "n_users", default=50, show_default=True, type=int)
@click.option("--days", default=14, show_default=True, type=int)
def generate(out_dir: Path, seed: int, n_users: int, days: int):
    """Write a synthetic campus dataset with scripted encounters."""
    script = synthdata.default_script(seed=seed, n_users=n_users, days=days)
    manifest = synthdata.generate(script, out_dir)
    click.echo(f"wrote {len(manifest['files'])} user files + manifest to {out_dir}")


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(path_type=Path), help="Dataset bundle directory (created or extended).")
@click.option("--user-id", default=None, help="User id for a single file (default: filename stem).")
@click.option("--accuracy-policy", default="drop_poor", show_default=True, type=click.Choice(["drop_poor", "keep_all", "high_only"]))
def ingest(files, dataset_dir: Path, user_id, accuracy_policy):
    """Parse Takeout location files into a dataset bundle."""
    if user_id and len(files) > 1:
        raise click.UsageError("--user-id only applies to a single file")
    store = TrajectoryStore.load(dataset_dir) if (dataset_dir / "metadata.json").exists() else TrajectoryStore()
    for f in files:
        uid = user_id or f.stem
        report = ingest_takeout_file(store, uid, f.read_bytes(), accuracy_policy=accuracy_policy)
        click.echo(
            f"{uid}: parsed={report.parsed} skipped={report.skipped} "
            f"dropped={report.dropped_by_accuracy} stored={report.stored}"
        )
    store.save(dataset_dir)
    click.echo(f"dataset saved to {dataset_dir} ({len(store.user_ids)} users)")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="Events CSV path.")
@click.option("--method", default="grid", show_default=True, type=click.Choice(["grid", "naive"]))
@_config_options
def analyze(dataset_dir, out_path: Path, method, max_gap_s, cell_m, **cfg):
    """Detect collision events and write them as CSV."""
    store = TrajectoryStore.load(dataset_dir)
    config = _build_config(**cfg)
    result = run_analysis(store, config, max_gap_s=max_gap_s, cell_m=cell_m, method=method)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(exporters.events_to_csv(result.events))
    click.echo(f"{len(result.events)} events ({result.stats.distance_tests} distance tests) -> {out_path}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="Levels CSV path.")
@_config_options
def trace(dataset_dir, out_path: Path, max_gap_s, cell_m, **cfg):
    """Classify Level-1/2/3 contacts of the index user."""
    index_user = cfg.pop("index_user")
    if not index_user:
        raise click.UsageError("--index-user is required for tracing")
    store = TrajectoryStore.load(dataset_dir)
    # level 2/3 chains need the full event graph, so detection runs
    # unfiltered; the index user steers the trace itself
    config = _build_config(index_user=None, **cfg)
    result = run_analysis(store, config, max_gap_s=max_gap_s, cell_m=cell_m)
    plan = screening_order(trace_for(result, index_user))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as fh:
        fh.write("user_id,level,via_user,first_contact_time,event_ref\n")
        for r in plan.records:
            fh.write(f"{r.user_id},{r.level},{r.via_user},{iso_utc(r.first_contact_time)},{r.event_ref}\n")
    counts = " ".join(f"L{k}={v}" for k, v in sorted(plan.level_counts.items()))
    click.echo(f"{len(plan.records)} contacts ({counts or 'none'}) -> {out_path}")


@main.command(name="simulate")
@click.option("--beta", required=True, type=float)
@click.option("--alpha", default=0.2, show_default=True, type=float)
@click.option("--gamma", required=True, type=float)
@click.option("--mu", "mu_values", multiple=True, type=float, default=(0.0,), show_default=True)
@click.option("--model", "model_kind", default="SEIR", show_default=True, type=click.Choice(["SIR", "SEIR"]))
@click.option("--s0", default=0.97, show_default=True, type=float)
@click.option("--e0", default=0.02, show_default=True, type=float)
@click.option("--i0", default=0.01, show_default=True, type=float)
@click.option("--r0", default=0.0, show_default=True, type=float)
@click.option("--population-n", default=50, show_default=True, type=int)
@click.option("--t-end-days", default=180.0, show_default=True, type=float)
@click.option("--dt-days", default=0.1, show_default=True, type=float)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path), help="Series CSV (for the first mu).")
@click.option("--fig", "fig_path", default=None, type=click.Path(path_type=Path), help="Optional PNG of the first-mu curves.")
def simulate_cmd(beta, alpha, gamma, mu_values, model_kind, s0, e0, i0, r0, population_n, t_end_days, dt_days, out_path: Path, fig_path):
    """Integrate the outbreak model and write the s/e/i/r series."""
    params = EpidemicParams(beta=beta, alpha=alpha, gamma=gamma, mu=mu_values[0], population_n=population_n, model_kind=model_kind)
    initial = EpidemicState(s0, e0, i0, r0)
    series = simulate(params, initial, t_end_days, dt_days, output_stride=10)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(exporters.series_to_csv(series))
    click.echo(
        f"mu={mu_values[0]}: peak_i={series.summary.peak_i:.4f} @ {series.summary.peak_time_days:.1f} d, "
        f"final_r={series.summary.final_r:.4f} -> {out_path}"
    )
    if len(mu_values) > 1:
        for s in mu_sweep(params, initial, list(mu_values), t_end_days, dt_days):
            click.echo(f"mu={s.mu}: peak_i={s.peak_i:.4f} final_r={s.final_r:.4f}")
    if fig_path:
        figures.epidemic_figure(series, fig_path)
        click.echo(f"figure -> {fig_path}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", required=True, type=click.Choice(["kml", "geojson"]))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def export(dataset_dir, fmt, out_path: Path):
    """Export raw user trajectories as KML or GeoJSON."""
    store = TrajectoryStore.load(dataset_dir)
    tracks = {uid: [s.point for s in store.trajectory(uid).samples] for uid in store.user_ids}
    text = exporters.tracks_to_kml(tracks, []) if fmt == "kml" else exporters.to_geojson(tracks, [])
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text)
    click.echo(f"{fmt} for {len(tracks)} users -> {out_path}")


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--user-id", default=None, help="User id (default: filename stem).")
def segments(files, out_path: Path, user_id):
    """Convert semantic-history activity segments to the tabular CSV."""
    all_segments = []
    for f in files:
        all_segments.extend(parse_activity_segments(f.read_bytes(), user_id or f.stem))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(exporters.segments_to_csv(all_segments))
    click.echo(f"{len(all_segments)} segments -> {out_path}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--beta", default=0.5, show_default=True, type=float, help="Illustrative what-if transmission rate.")
@click.option("--alpha", default=0.2, show_default=True, type=float)
@click.option("--gamma", default=0.1, show_default=True, type=float)
@_config_options
def report(dataset_dir, out_dir: Path, beta, alpha, gamma, max_gap_s, cell_m, **cfg):
    """Full analyst report: CSV tables plus rendered figures.

    Writes events.csv, levels.csv, report.csv, scores.csv, tracks.geojson
    and map.png, epidemic.png, mu_sweep.png into --out-dir.
    """
    index_user = cfg.pop("index_user")
    if not index_user:
        raise click.UsageError("--index-user is required for a report")
    store = TrajectoryStore.load(dataset_dir)
    config = _build_config(index_user=None, **cfg)  # tracing needs all-pairs events
    result = run_analysis(store, config, max_gap_s=max_gap_s, cell_m=cell_m)
    records = trace_for(result, index_user)
    levels = {r.user_id: r.level for r in records}
    rows = report_for(result, index_user)
    scored = scores_for(result, index_user)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "events.csv").write_text(exporters.events_to_csv(result.events))
    (out_dir / "report.csv").write_text(exporters.report_to_csv(rows))
    with open(out_dir / "levels.csv", "w") as fh:
        fh.write("user_id,level,via_user,first_contact_time,event_ref\n")
        for r in screening_order(records).records:
            fh.write(f"{r.user_id},{r.level},{r.via_user},{iso_utc(r.first_contact_time)},{r.event_ref}\n")
    with open(out_dir / "scores.csv", "w") as fh:
        fh.write("subject,kind,value,numerator_sum,area_m2,mean_distance_m\n")
        for subject, s in scored:
            fh.write(f"{subject},{s.kind},{s.value!r},{s.numerator_sum!r},{s.area_m2!r},{s.mean_distance_m!r}\n")

    tracks = {uid: [s.point for s in store.trajectory(uid).samples] for uid in store.user_ids}
    (out_dir / "tracks.geojson").write_text(exporters.to_geojson(tracks, result.events, levels))
    figures.map_figure(tracks, result.events, out_dir / "map.png", levels)

    params = EpidemicParams(beta=beta, alpha=alpha, gamma=gamma, population_n=len(store.user_ids) or 50)
    initial = EpidemicState(0.97, 0.02, 0.01, 0.0)
    series = simulate(params, initial, 180.0, 0.1, output_stride=10)
    (out_dir / "epidemic.csv").write_text(exporters.series_to_csv(series))
    figures.epidemic_figure(series, out_dir / "epidemic.png")
    sweep = mu_sweep(params, initial, [0.0, 0.25, 0.5, 0.75, 1.0])
    figures.mu_sweep_figure(sweep, out_dir / "mu_sweep.png")

    click.echo(
        f"report for index user {index_user}: {len(result.events)} events, "
        f"{len(records)} contacts -> {out_dir}"
    )


@main.command()
@click.option("--data-dir", required=True, type=click.Path(path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--console", "console_dir", default=None, type=click.Path(exists=True, path_type=Path), help="Built analyst console to host at /console (the frontend/ directory after npm run build).")
def serve(data_dir: Path, host: str, port: int, console_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir, console_dir=console_dir), host=host, port=port)


if __name__ == "__main__":
    main()
