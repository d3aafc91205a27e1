"""End-to-end analysis pipeline: ingest -> detect -> trace -> score -> report.

Thin orchestration over the library modules so the CLI and the HTTP
service run exactly the same code path. The pipeline is deterministic:
rerunning the same store + config reproduces identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .exporters import ReportRow, level_report
from .proximity import ContactEvent, DetectionStats, ProximityConfig, detect_collisions
from .scoring import ContactScore, ScoreParams, build_mobility_matrix, direct_contact_score, indirect_contact_score
from .store import ResampledTrack, SiteGrid, TrajectoryStore, DEFAULT_CELL_M, DEFAULT_MAX_GAP_S
from .takeout import filter_by_accuracy, normalize, parse_location_records
from .tracing import ContactLevelRecord, trace_levels


@dataclass
class IngestReport:
    user_id: str
    parsed: int
    skipped: int
    dropped_by_accuracy: int
    stored: int
    first: str | None
    last: str | None


def ingest_takeout_file(
    store: TrajectoryStore,
    user_id: str,
    data: bytes | str,
    accuracy_policy: str = "drop_poor",
) -> IngestReport:
    """Parse + normalize + filter one raw-records document into the store."""
    parsed = parse_location_records(data)
    samples = [normalize(r, user_id) for r in parsed.records]
    filtered = filter_by_accuracy(samples, policy=accuracy_policy)
    summary = store.ingest_user(user_id, filtered.samples)
    span = summary.time_span
    from .timeutil import iso_utc

    return IngestReport(
        user_id=user_id,
        parsed=len(parsed.records),
        skipped=parsed.skipped,
        dropped_by_accuracy=filtered.dropped,
        stored=summary.stored_count,
        first=iso_utc(span[0]) if span else None,
        last=iso_utc(span[1]) if span else None,
    )


@dataclass
class AnalysisResult:
    config: ProximityConfig
    events: list[ContactEvent]
    tracks: dict[str, ResampledTrack]
    site_grid: SiteGrid
    stats: DetectionStats
    known_users: list[str] = field(default_factory=list)


def run_analysis(
    store: TrajectoryStore,
    config: ProximityConfig,
    max_gap_s: int = DEFAULT_MAX_GAP_S,
    cell_m: float = DEFAULT_CELL_M,
    method: str = "grid",
) -> AnalysisResult:
    """Resample every user onto the config grid and detect collisions."""
    tracks = {
        uid: store.resample(uid, config.grid_start, config.step_s, config.window_s, max_gap_s)
        for uid in store.user_ids
    }
    site_grid = store.site_grid(cell_m)
    stats = DetectionStats()
    events = detect_collisions(config, tracks, site_grid=site_grid, method=method, stats=stats)
    return AnalysisResult(
        config=config,
        events=events,
        tracks=tracks,
        site_grid=site_grid,
        stats=stats,
        known_users=store.user_ids,
    )


def trace_for(result: AnalysisResult, index_user: str, max_level: int = 3) -> list[ContactLevelRecord]:
    return trace_levels(index_user, result.events, max_level=max_level, known_users=result.known_users)


def score_params_for(config: ProximityConfig, incubation_days: int = 15, d_min_m: float = 0.5) -> ScoreParams:
    """Default scoring parameters: interaction disc of the collision radius."""
    return ScoreParams(
        incubation_days=incubation_days,
        area_m2=math.pi * config.collision_distance_m**2,
        d_min_m=d_min_m,
    )


def scores_for(
    result: AnalysisResult,
    index_user: str,
    params: ScoreParams | None = None,
) -> list[tuple[str, ContactScore]]:
    """Direct score for the index case, indirect for each level-1 contact."""
    params = params or score_params_for(result.config)
    records = trace_for(result, index_user)
    out = []
    matrix = build_mobility_matrix(
        index_user, result.events, result.tracks, result.site_grid, params, subject_kind="confirmed"
    )
    out.append((index_user, direct_contact_score(matrix, params)))
    for rec in records:
        if rec.level != 1:
            continue
        m = build_mobility_matrix(
            rec.user_id, result.events, result.tracks, result.site_grid, params, subject_kind="suspected"
        )
        out.append((rec.user_id, indirect_contact_score(m, params)))
    return out


def report_for(result: AnalysisResult, index_user: str, max_level: int = 3) -> list[ReportRow]:
    records = trace_for(result, index_user, max_level=max_level)
    return level_report(records, result.events, result.site_grid)


def load_dataset(bundle_dir: str | Path) -> TrajectoryStore:
    return TrajectoryStore.load(bundle_dir)
