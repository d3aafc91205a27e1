"""Per-user trajectory storage, time-grid resampling, and site cells.

The store keeps each user's samples sorted and de-duplicated, can lay a
trajectory onto a shared time grid by linear interpolation (never
bridging gaps longer than ``max_gap_s``), and discretizes the campus
into a fixed square grid of cells so that "locations" have a stable,
reproducible index. Datasets round-trip through a directory bundle of
one metadata document plus one CSV sample table per user.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import NotFoundError
from .geo import GeoPoint, METERS_PER_DEG_LAT
from .takeout import E7_SCALE, LocationSample, accuracy_band
from .timeutil import from_ms, to_ms

DEFAULT_MAX_GAP_S = 600
DEFAULT_CELL_M = 10.0

_BUNDLE_SCHEMA = 1


@dataclass(frozen=True)
class Trajectory:
    """A user's full, time-ordered sample sequence."""

    user_id: str
    samples: tuple[LocationSample, ...]

    @property
    def time_span(self) -> tuple[datetime, datetime]:
        return self.samples[0].time_utc, self.samples[-1].time_utc


@dataclass
class IngestSummary:
    user_id: str
    batch_count: int
    stored_count: int
    time_span: tuple[datetime, datetime] | None


@dataclass
class ResampledTrack:
    """A trajectory snapped onto a shared grid of instants.

    ``lat``/``lon``/``accuracy`` are float arrays with NaN where the user
    has no position within the interpolation gap limit.
    """

    user_id: str
    grid_start: datetime
    step_s: int
    lat: np.ndarray
    lon: np.ndarray
    accuracy: np.ndarray

    @property
    def n_ticks(self) -> int:
        return len(self.lat)

    def present(self) -> np.ndarray:
        return ~np.isnan(self.lat)

    def position(self, tick: int) -> GeoPoint | None:
        if math.isnan(self.lat[tick]):
            return None
        return GeoPoint(float(self.lat[tick]), float(self.lon[tick]))

    def tick_time(self, tick: int) -> datetime:
        return from_ms(to_ms(self.grid_start) + tick * self.step_s * 1000)


@dataclass(frozen=True)
class SiteGrid:
    """Axis-aligned square grid anchored at a dataset's min lat/lon corner."""

    origin_lat: float
    origin_lon: float
    cell_m: float = DEFAULT_CELL_M

    def _scales(self) -> tuple[float, float]:
        m_per_deg_lon = METERS_PER_DEG_LAT * math.cos(math.radians(self.origin_lat))
        return METERS_PER_DEG_LAT / self.cell_m, m_per_deg_lon / self.cell_m

    def cell_of(self, lat_deg: float, lon_deg: float) -> tuple[int, int]:
        row_scale, col_scale = self._scales()
        row = math.floor((lat_deg - self.origin_lat) * row_scale)
        col = math.floor((lon_deg - self.origin_lon) * col_scale)
        return row, col

    def cells_of(self, lat: np.ndarray, lon: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized cell_of; NaN positions map to row/col of -2**31."""
        row_scale, col_scale = self._scales()
        with np.errstate(invalid="ignore"):
            rows = np.floor((lat - self.origin_lat) * row_scale)
            cols = np.floor((lon - self.origin_lon) * col_scale)
        rows = np.where(np.isnan(rows), -(2**31), rows).astype(np.int64)
        cols = np.where(np.isnan(cols), -(2**31), cols).astype(np.int64)
        return rows, cols

    def cell_bounds(self, cell: tuple[int, int]) -> tuple[float, float, float, float]:
        """(lat_min, lon_min, lat_max, lon_max) of a cell, inverse of cell_of."""
        row_scale, col_scale = self._scales()
        row, col = cell
        return (
            self.origin_lat + row / row_scale,
            self.origin_lon + col / col_scale,
            self.origin_lat + (row + 1) / row_scale,
            self.origin_lon + (col + 1) / col_scale,
        )

    @staticmethod
    def label(cell: tuple[int, int]) -> str:
        return f"r{cell[0]}c{cell[1]}"


@dataclass
class SiteCell:
    """A grid cell and who visited it (sample counts per user)."""

    cell_id: tuple[int, int]
    visit_count: dict[str, int] = field(default_factory=dict)

    @property
    def visitor_set(self) -> set[str]:
        return set(self.visit_count)

    @property
    def total_visits(self) -> int:
        return sum(self.visit_count.values())


class TrajectoryStore:
    """In-memory dataset of user trajectories with file-bundle persistence."""

    def __init__(self):
        self._samples: dict[str, list[LocationSample]] = {}
        self._arrays: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}

    # -- ingestion ---------------------------------------------------------

    def ingest_user(self, user_id: str, samples: list[LocationSample]) -> IngestSummary:
        """Merge a batch into the user's trajectory (sorted, de-duplicated).

        Duplicate timestamps keep the sample with the better (smaller)
        accuracy; ties keep the earliest-ingested one. Re-ingesting an
        identical batch leaves the store unchanged.
        """
        for s in samples:
            if s.user_id != user_id:
                raise ValueError(f"batch for {user_id!r} contains sample for {s.user_id!r}")
        merged = self._samples.get(user_id, []) + sorted(samples, key=lambda s: s.time_utc)
        merged.sort(key=lambda s: s.time_utc)  # stable: earlier-ingested first on ties
        deduped: list[LocationSample] = []
        for s in merged:
            if deduped and deduped[-1].time_utc == s.time_utc:
                if s.accuracy_m < deduped[-1].accuracy_m:
                    deduped[-1] = s
            else:
                deduped.append(s)
        self._samples[user_id] = deduped
        self._arrays.pop(user_id, None)
        span = (deduped[0].time_utc, deduped[-1].time_utc) if deduped else None
        return IngestSummary(user_id=user_id, batch_count=len(samples), stored_count=len(deduped), time_span=span)

    # -- queries -----------------------------------------------------------

    @property
    def user_ids(self) -> list[str]:
        return sorted(self._samples)

    def trajectory(self, user_id: str) -> Trajectory:
        if user_id not in self._samples:
            raise NotFoundError(f"unknown user: {user_id!r}")
        return Trajectory(user_id=user_id, samples=tuple(self._samples[user_id]))

    def query_window(self, user_id: str, start: datetime, end: datetime) -> list[LocationSample]:
        """Samples with start <= t < end, in time order."""
        traj = self.trajectory(user_id)
        return [s for s in traj.samples if start <= s.time_utc < end]

    def time_span(self) -> tuple[datetime, datetime] | None:
        firsts = [s[0].time_utc for s in self._samples.values() if s]
        lasts = [s[-1].time_utc for s in self._samples.values() if s]
        if not firsts:
            return None
        return min(firsts), max(lasts)

    def origin(self) -> tuple[float, float]:
        """Dataset minimum lat/lon corner; anchors the site grid."""
        lats = [s.point.lat_deg for ss in self._samples.values() for s in ss]
        lons = [s.point.lon_deg for ss in self._samples.values() for s in ss]
        if not lats:
            raise NotFoundError("store is empty; no grid origin")
        return min(lats), min(lons)

    def site_grid(self, cell_m: float = DEFAULT_CELL_M) -> SiteGrid:
        lat0, lon0 = self.origin()
        return SiteGrid(origin_lat=lat0, origin_lon=lon0, cell_m=cell_m)

    # -- resampling --------------------------------------------------------

    def _user_arrays(self, user_id: str):
        if user_id not in self._arrays:
            samples = self._samples.get(user_id)
            if samples is None:
                raise NotFoundError(f"unknown user: {user_id!r}")
            t = np.array([to_ms(s.time_utc) for s in samples], dtype=np.int64)
            lat = np.array([s.point.lat_deg for s in samples], dtype=np.float64)
            lon = np.array([s.point.lon_deg for s in samples], dtype=np.float64)
            acc = np.array([s.accuracy_m for s in samples], dtype=np.float64)
            self._arrays[user_id] = (t, lat, lon, acc)
        return self._arrays[user_id]

    def resample(
        self,
        user_id: str,
        grid_start: datetime,
        step_s: int,
        window_s: int,
        max_gap_s: int = DEFAULT_MAX_GAP_S,
    ) -> ResampledTrack:
        """Interpolate the trajectory onto ticks grid_start + k*step_s.

        A tick gets a position only when it is bracketed by two samples
        whose gap is at most ``max_gap_s`` (per-coordinate linear
        interpolation in degrees); ticks before the first or after the
        last sample stay absent. Interpolation never invents presence.
        """
        if step_s <= 0:
            raise ValueError(f"step_s must be positive, got {step_s}")
        t, lat, lon, acc = self._user_arrays(user_id)
        n_ticks = math.ceil(window_s / step_s)
        start_ms = to_ms(grid_start)
        grid = start_ms + np.arange(n_ticks, dtype=np.int64) * (step_s * 1000)

        out_lat = np.full(n_ticks, np.nan)
        out_lon = np.full(n_ticks, np.nan)
        out_acc = np.full(n_ticks, np.nan)
        if len(t) == 0:
            return ResampledTrack(user_id, grid_start, step_s, out_lat, out_lon, out_acc)

        idx = np.searchsorted(t, grid, side="right") - 1
        in_range = (idx >= 0) & (grid <= t[-1])
        left = np.clip(idx, 0, len(t) - 1)
        exact = in_range & (grid == t[left])
        right = np.clip(idx + 1, 0, len(t) - 1)
        gap_ok = in_range & (idx + 1 < len(t)) & ((t[right] - t[left]) <= max_gap_s * 1000)
        between = gap_ok & ~exact

        for src, dst in ((lat, out_lat), (lon, out_lon), (acc, out_acc)):
            dst[exact] = src[left[exact]]
            if between.any():
                t0 = t[left[between]].astype(np.float64)
                t1 = t[right[between]].astype(np.float64)
                w = (grid[between] - t0) / (t1 - t0)
                dst[between] = (1.0 - w) * src[left[between]] + w * src[right[between]]
        return ResampledTrack(user_id, grid_start, step_s, out_lat, out_lon, out_acc)

    # -- common locations ---------------------------------------------------

    def common_locations(
        self,
        user_ids: list[str] | None = None,
        cell_m: float = DEFAULT_CELL_M,
        min_users: int = 2,
    ) -> list[SiteCell]:
        """Cells visited by at least ``min_users`` distinct users.

        Visits are counted per raw sample. Cells below the threshold are
        the "uncommon locations" that downstream analysis excludes.
        Sorted by descending distinct-visitor count, then total visits,
        then cell id for determinism.
        """
        if cell_m <= 0:
            raise ValueError(f"cell_m must be positive, got {cell_m}")
        users = user_ids if user_ids is not None else self.user_ids
        grid = self.site_grid(cell_m)
        cells: dict[tuple[int, int], SiteCell] = {}
        for uid in users:
            for s in self.trajectory(uid).samples:
                cell_id = grid.cell_of(s.point.lat_deg, s.point.lon_deg)
                cell = cells.setdefault(cell_id, SiteCell(cell_id=cell_id))
                cell.visit_count[uid] = cell.visit_count.get(uid, 0) + 1
        kept = [c for c in cells.values() if len(c.visit_count) >= min_users]
        kept.sort(key=lambda c: (-len(c.visit_count), -c.total_visits, c.cell_id))
        return kept

    # -- persistence ---------------------------------------------------------

    def save(self, bundle_dir: str | Path) -> None:
        """Write the dataset bundle: metadata.json + per-user sample CSVs."""
        bundle = Path(bundle_dir)
        samples_dir = bundle / "samples"
        samples_dir.mkdir(parents=True, exist_ok=True)
        users_meta = []
        for i, uid in enumerate(self.user_ids):
            fname = f"u{i:04d}.csv"
            samples = self._samples[uid]
            with open(samples_dir / fname, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["time_ms", "lat_e7", "lon_e7", "accuracy_m", "activity_type"])
                for s in samples:
                    writer.writerow(
                        [
                            to_ms(s.time_utc),
                            round(s.point.lat_deg * E7_SCALE),
                            round(s.point.lon_deg * E7_SCALE),
                            s.accuracy_m,
                            s.activity_type or "",
                        ]
                    )
            users_meta.append(
                {
                    "user_id": uid,
                    "file": fname,
                    "count": len(samples),
                    "first_ms": to_ms(samples[0].time_utc) if samples else None,
                    "last_ms": to_ms(samples[-1].time_utc) if samples else None,
                }
            )
        origin = self.origin() if any(self._samples.values()) else None
        meta = {
            "schema": _BUNDLE_SCHEMA,
            "users": users_meta,
            "grid_origin": {"lat": origin[0], "lon": origin[1]} if origin else None,
            "default_cell_m": DEFAULT_CELL_M,
        }
        with open(bundle / "metadata.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, bundle_dir: str | Path) -> "TrajectoryStore":
        bundle = Path(bundle_dir)
        meta_path = bundle / "metadata.json"
        if not meta_path.exists():
            raise NotFoundError(f"no dataset bundle at {bundle}")
        with open(meta_path) as fh:
            meta = json.load(fh)
        if meta.get("schema") != _BUNDLE_SCHEMA:
            raise ValueError(f"unsupported bundle schema: {meta.get('schema')}")
        store = cls()
        for user in meta["users"]:
            uid = user["user_id"]
            samples: list[LocationSample] = []
            with open(bundle / "samples" / user["file"], newline="") as fh:
                for row in csv.DictReader(fh):
                    acc = float(row["accuracy_m"])
                    samples.append(
                        LocationSample(
                            user_id=uid,
                            time_utc=from_ms(int(row["time_ms"])),
                            point=GeoPoint(int(row["lat_e7"]) / E7_SCALE, int(row["lon_e7"]) / E7_SCALE),
                            accuracy_m=acc,
                            accuracy_band=accuracy_band(acc),
                            activity_type=row["activity_type"] or None,
                        )
                    )
            store.ingest_user(uid, samples)
        return store
