"""HTTP/JSON service over the analysis pipeline.

Datasets are uploaded as multipart Takeout files (one per user, user id
taken from the filename stem) and become immutable store bundles on
disk. Analyses run synchronously for small datasets and on a bounded
worker pool above ``sync_threshold`` users (create, then poll status).
Responses ride in a schema-versioned envelope; request bodies are strict
(unknown fields rejected) so misspelled analyst settings fail loudly.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import date, datetime, time, timezone
from pathlib import Path

from fastapi import FastAPI, Query, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import exporters
from .epidemic import EpidemicParams, EpidemicState, mu_sweep, simulate
from .errors import ConfigError, NotFoundError, ParseError
from .pipeline import (
    AnalysisResult,
    IngestReport,
    ingest_takeout_file,
    report_for,
    run_analysis,
    scores_for,
    trace_for,
)
from .proximity import ProximityConfig
from .store import TrajectoryStore
from .timeutil import iso_utc
from .tracing import screening_order

SCHEMA_VERSION = 1
DEFAULT_MAX_UPLOAD_BYTES = 64 * 1024 * 1024
DEFAULT_SYNC_THRESHOLD_USERS = 10


def _envelope(data) -> dict:
    return {"schema_version": SCHEMA_VERSION, "data": data}


class AnalysisRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start_date: date
    start_time: time = time(0, 0, 0)
    window_days: int = 14
    step_s: int = 60
    collision_distance_m: float = 1.0
    collision_interval_s: int = 300
    index_user: str | None = None
    max_gap_s: int = 600
    cell_m: float = 10.0

    def to_config(self) -> ProximityConfig:
        return ProximityConfig(
            start_date=self.start_date,
            start_time=self.start_time,
            window_days=self.window_days,
            step_s=self.step_s,
            collision_distance_m=self.collision_distance_m,
            collision_interval_s=self.collision_interval_s,
            index_user=self.index_user,
        )


class SimulationParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    beta: float
    alpha: float
    gamma: float
    population_n: int = 50
    model_kind: str = "SEIR"


class SimulationInitial(BaseModel):
    model_config = ConfigDict(extra="forbid")

    s: float
    e: float = 0.0
    i: float = 0.0
    r: float = 0.0


class SimulationRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: SimulationParams
    initial: SimulationInitial
    t_end_days: float = 180.0
    dt_days: float = 0.1
    output_stride: int = 10
    mu_values: list[float] = Field(default_factory=lambda: [0.0])


class _Dataset:
    def __init__(self, dataset_id: str, store: TrajectoryStore, reports: list[IngestReport]):
        self.dataset_id = dataset_id
        self.store = store
        self.reports = reports
        self.created_at = datetime.now(timezone.utc)

    def summary(self) -> dict:
        span = self.store.time_span()
        return {
            "dataset_id": self.dataset_id,
            "created_at": iso_utc(self.created_at),
            "n_users": len(self.store.user_ids),
            "users": [vars(r) for r in self.reports],
            "time_span": [iso_utc(span[0]), iso_utc(span[1])] if span else None,
        }


class _Run:
    def __init__(self, run_id: str, dataset_id: str, request: AnalysisRequest):
        self.run_id = run_id
        self.dataset_id = dataset_id
        self.request = request
        self.status = "pending"
        self.error: str | None = None
        self.result: AnalysisResult | None = None
        self.created_at = datetime.now(timezone.utc)

    def summary(self) -> dict:
        return {
            "run_id": self.run_id,
            "dataset_id": self.dataset_id,
            "status": self.status,
            "error": self.error,
            "created_at": iso_utc(self.created_at),
            "config": self.request.model_dump(mode="json"),
            "n_events": len(self.result.events) if self.result else None,
        }


def create_app(
    data_dir: str | Path,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES,
    sync_threshold_users: int = DEFAULT_SYNC_THRESHOLD_USERS,
    workers: int = 2,
    console_dir: str | Path | None = None,
) -> FastAPI:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="campustrace", version="0.1.0")
    if console_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")
    datasets: dict[str, _Dataset] = {}
    runs: dict[str, _Run] = {}
    lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=workers)

    @app.exception_handler(NotFoundError)
    async def _not_found(_req: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ParseError)
    async def _parse_error(_req: Request, exc: ParseError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "offset": exc.offset})

    @app.exception_handler(ConfigError)
    async def _config_error(_req: Request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(_req: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    def _get_dataset(dataset_id: str) -> _Dataset:
        ds = datasets.get(dataset_id)
        if ds is None:
            raise NotFoundError(f"unknown dataset: {dataset_id!r}")
        return ds

    def _get_run(run_id: str) -> _Run:
        run = runs.get(run_id)
        if run is None:
            raise NotFoundError(f"unknown analysis run: {run_id!r}")
        return run

    def _finished_run(run_id: str) -> _Run:
        run = _get_run(run_id)
        if run.status == "failed":
            raise ConfigError(f"analysis failed: {run.error}")
        if run.status != "done":
            raise ConfigError(f"analysis not finished (status={run.status}); poll GET /analyses/{run_id}")
        return run

    def _index_user_for(run: _Run, query_value: str | None) -> str:
        index_user = query_value or run.request.index_user
        if not index_user:
            raise ConfigError("no index_user in the analysis config; pass ?index_user=")
        return index_user

    @app.get("/health")
    def health():
        return _envelope({"status": "ok"})

    @app.post("/datasets", status_code=201)
    async def upload_dataset(files: list[UploadFile]):
        if not files:
            raise ConfigError("no files uploaded")
        store = TrajectoryStore()
        reports: list[IngestReport] = []
        for f in files:
            payload = await f.read()
            if len(payload) > max_upload_bytes:
                return JSONResponse(
                    status_code=413,
                    content={"detail": f"file {f.filename} exceeds {max_upload_bytes} bytes"},
                )
            user_id = Path(f.filename or "user").stem
            reports.append(ingest_takeout_file(store, user_id, payload))
        dataset_id = uuid.uuid4().hex[:12]
        ds = _Dataset(dataset_id, store, reports)
        with lock:
            datasets[dataset_id] = ds
        store.save(data_dir / "datasets" / dataset_id)
        return _envelope(ds.summary())

    @app.get("/datasets")
    def list_datasets():
        with lock:
            return _envelope([ds.summary() for ds in datasets.values()])

    @app.get("/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        return _envelope(_get_dataset(dataset_id).summary())

    @app.get("/datasets/{dataset_id}/common-locations")
    def common_locations(
        dataset_id: str,
        cell_m: float = Query(10.0, gt=0),
        min_users: int = Query(2, ge=1),
    ):
        ds = _get_dataset(dataset_id)
        grid = ds.store.site_grid(cell_m)
        cells = ds.store.common_locations(cell_m=cell_m, min_users=min_users)
        return _envelope(
            {
                "cell_m": cell_m,
                "min_users": min_users,
                "cells": [
                    {
                        "cell": list(c.cell_id),
                        "label": grid.label(c.cell_id),
                        "visitors": sorted(c.visitor_set),
                        "total_visits": c.total_visits,
                        "bounds": list(grid.cell_bounds(c.cell_id)),
                    }
                    for c in cells
                ],
            }
        )

    @app.get("/datasets/{dataset_id}/geojson")
    def dataset_geojson(dataset_id: str, analysis_id: str | None = None, index_user: str | None = None):
        ds = _get_dataset(dataset_id)
        tracks = {uid: [s.point for s in ds.store.trajectory(uid).samples] for uid in ds.store.user_ids}
        events, levels = [], None
        if analysis_id:
            run = _finished_run(analysis_id)
            events = run.result.events
            if index_user:
                levels = {r.user_id: r.level for r in trace_for(run.result, index_user)}
        return JSONResponse(content=json.loads(exporters.to_geojson(tracks, events, levels)))

    def _execute(run: _Run) -> None:
        run.status = "running"
        try:
            ds = _get_dataset(run.dataset_id)
            config = run.request.to_config()
            run.result = run_analysis(
                ds.store, config, max_gap_s=run.request.max_gap_s, cell_m=run.request.cell_m
            )
            run_dir = data_dir / "runs" / run.run_id
            run_dir.mkdir(parents=True, exist_ok=True)
            (run_dir / "events.csv").write_text(exporters.events_to_csv(run.result.events))
            run.status = "done"
        except Exception as exc:  # surfaced via run status, not a 500
            run.status = "failed"
            run.error = str(exc)

    @app.post("/datasets/{dataset_id}/analyses", status_code=201)
    def create_analysis(dataset_id: str, request: AnalysisRequest):
        ds = _get_dataset(dataset_id)
        request.to_config()  # validate verbosely before accepting the run
        run = _Run(uuid.uuid4().hex[:12], dataset_id, request)
        with lock:
            runs[run.run_id] = run
        if len(ds.store.user_ids) < sync_threshold_users:
            _execute(run)
        else:
            pool.submit(_execute, run)
        return _envelope(run.summary())

    @app.get("/analyses/{run_id}")
    def get_analysis(run_id: str):
        return _envelope(_get_run(run_id).summary())

    @app.get("/analyses/{run_id}/events")
    def get_events(run_id: str, offset: int = Query(0, ge=0), limit: int = Query(1000, ge=1, le=10000)):
        run = _finished_run(run_id)
        events = run.result.events
        page = events[offset : offset + limit]
        return _envelope(
            {
                "total": len(events),
                "offset": offset,
                "events": [exporters.event_to_dict(e) for e in page],
            }
        )

    @app.get("/analyses/{run_id}/levels")
    def get_levels(run_id: str, index_user: str | None = None, max_level: int = Query(3, ge=1, le=10)):
        run = _finished_run(run_id)
        user = _index_user_for(run, index_user)
        records = trace_for(run.result, user, max_level=max_level)
        plan = screening_order(records)
        return _envelope(
            {
                "index_user": user,
                "level_counts": {str(k): v for k, v in sorted(plan.level_counts.items())},
                "records": [
                    {
                        "user_id": r.user_id,
                        "level": r.level,
                        "via_user": r.via_user,
                        "first_contact_time": iso_utc(r.first_contact_time),
                        "event_ref": r.event_ref,
                    }
                    for r in plan.records
                ],
            }
        )

    @app.get("/analyses/{run_id}/scores")
    def get_scores(run_id: str, index_user: str | None = None):
        run = _finished_run(run_id)
        user = _index_user_for(run, index_user)
        scored = scores_for(run.result, user)
        return _envelope(
            {
                "index_user": user,
                "scores": [
                    {
                        "subject": subject,
                        "kind": s.kind,
                        "value": s.value,
                        "numerator_sum": s.numerator_sum,
                        "area_m2": s.area_m2,
                        "mean_distance_m": s.mean_distance_m,
                    }
                    for subject, s in scored
                ],
            }
        )

    @app.get("/analyses/{run_id}/report")
    def get_report(run_id: str, index_user: str | None = None):
        run = _finished_run(run_id)
        user = _index_user_for(run, index_user)
        rows = report_for(run.result, user)
        return _envelope({"index_user": user, "rows": [exporters.row_to_dict(r) for r in rows]})

    @app.post("/simulations")
    def run_simulation(request: SimulationRequest):
        params = EpidemicParams(
            beta=request.params.beta,
            alpha=request.params.alpha,
            gamma=request.params.gamma,
            population_n=request.params.population_n,
            model_kind=request.params.model_kind,
        )
        initial = EpidemicState(request.initial.s, request.initial.e, request.initial.i, request.initial.r)
        from dataclasses import replace

        series_by_mu = []
        for mu in request.mu_values:
            if not 0.0 <= mu <= 1.0:
                raise ValueError(f"mu must be within [0, 1], got {mu}")
            series = simulate(
                replace(params, mu=mu), initial, request.t_end_days, request.dt_days, request.output_stride
            )
            series_by_mu.append(
                {
                    "mu": mu,
                    "summary": {
                        "peak_i": series.summary.peak_i,
                        "peak_time_days": series.summary.peak_time_days,
                        "final_r": series.summary.final_r,
                    },
                    "states": [
                        {"t": st.t, "s": st.s, "e": st.e, "i": st.i, "r": st.r} for st in series.states
                    ],
                }
            )
        return _envelope({"population_n": params.population_n, "runs": series_by_mu})

    return app
