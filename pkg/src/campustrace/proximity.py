"""Collision detection: pairs of users within a distance threshold long enough to count.

Definitions: at a grid tick, two users are *in contact* when both have a
position and their haversine distance is at most the collision distance.
A :class:`ContactEvent` is a maximal run of consecutive in-contact ticks
whose time span reaches the collision interval. A single absent or
out-of-range tick breaks a run; there is no gap-bridging.

Two detection paths are provided: a naive all-pairs-all-ticks scan (the
reference), and a spatial-hash candidate grid that skips pairs that
cannot possibly be within the threshold. Both paths gather per-tick
positions identically and feed the same event constructor, so their
outputs are bit-identical; the grid is purely a pruning device.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from itertools import combinations
from typing import Mapping

import numpy as np

from .errors import ConfigError, NotFoundError
from .geo import EARTH_RADIUS_KM, GeoPoint, METERS_PER_DEG_LAT
from .store import ResampledTrack, SiteGrid
from .timeutil import from_ms, to_ms

# Above this |latitude| the grid's longitude-projection bound is no longer
# conservative, so detection falls back to the naive scan (same output).
_GRID_MAX_ABS_LAT = 85.0


@dataclass(frozen=True)
class ProximityConfig:
    """Analysis window and collision thresholds (the analyst-facing knobs)."""

    start_date: date
    start_time: time = time(0, 0, 0)
    window_days: int = 14
    step_s: int = 60
    collision_distance_m: float = 1.0
    collision_interval_s: int = 300
    index_user: str | None = None

    def __post_init__(self):
        if self.window_days < 1:
            raise ConfigError(f"window_days must be >= 1, got {self.window_days}")
        if self.step_s <= 0:
            raise ConfigError(f"step_s must be positive, got {self.step_s}")
        if self.collision_distance_m <= 0:
            raise ConfigError(f"collision_distance_m must be positive, got {self.collision_distance_m}")
        if self.collision_interval_s < self.step_s:
            raise ConfigError(
                f"collision_interval_s ({self.collision_interval_s}) must be >= step_s ({self.step_s})"
            )

    @property
    def grid_start(self) -> datetime:
        return datetime.combine(self.start_date, self.start_time, tzinfo=timezone.utc)

    @property
    def window_s(self) -> int:
        return self.window_days * 86400

    @property
    def n_ticks(self) -> int:
        return math.ceil(self.window_s / self.step_s)


@dataclass
class ContactEvent:
    """A maximal qualifying contact run between one user pair."""

    user_a: str
    user_b: str
    t_start: datetime
    t_end: datetime
    duration_s: int
    min_distance_m: float
    mean_distance_m: float
    mean_accuracy_m: float
    midpoint: GeoPoint
    site_cell: tuple[int, int] | None
    tick_start: int
    tick_end: int

    @property
    def event_id(self) -> str:
        return f"{self.user_a}|{self.user_b}|{self.tick_start}"

    @property
    def n_ticks(self) -> int:
        return self.tick_end - self.tick_start + 1


@dataclass
class DetectionStats:
    """Work counters for comparing the pruned and naive paths."""

    method: str = ""
    distance_tests: int = 0
    pairs_tested: int = 0
    events: int = 0


def _haversine_m(lat1, lon1, lat2, lon2):
    """Vectorized haversine in meters over degree arrays."""
    lat1 = np.radians(lat1)
    lat2 = np.radians(lat2)
    dlat = lat2 - lat1
    dlon = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    c = 2.0 * np.arctan2(np.sqrt(a), np.sqrt(np.maximum(0.0, 1.0 - a)))
    return EARTH_RADIUS_KM * 1000.0 * c


class _TrackMatrix:
    """Tick-major position matrices for a set of tracks on one shared grid."""

    def __init__(self, tracks: Mapping[str, ResampledTrack]):
        if not tracks:
            raise ConfigError("no tracks supplied")
        self.user_ids = sorted(tracks)
        grids = {(to_ms(t.grid_start), t.step_s, t.n_ticks) for t in tracks.values()}
        if len(grids) != 1:
            raise ConfigError(f"tracks do not share one time grid: {sorted(grids)}")
        (self.start_ms, self.step_s, self.n_ticks), = grids
        self.lat = np.stack([tracks[u].lat for u in self.user_ids], axis=1)  # (T, U)
        self.lon = np.stack([tracks[u].lon for u in self.user_ids], axis=1)
        self.acc = np.stack([tracks[u].accuracy for u in self.user_ids], axis=1)
        self.present = ~np.isnan(self.lat)

    def check_config(self, config: ProximityConfig) -> None:
        if (to_ms(config.grid_start), config.step_s, config.n_ticks) != (
            self.start_ms,
            self.step_s,
            self.n_ticks,
        ):
            raise ConfigError("tracks were resampled on a different grid than the config describes")


class CandidateGrid:
    """Per-tick spatial hash over track positions.

    Positions are projected to meters with a longitude scale taken at the
    dataset's maximum |latitude|, which never overestimates true
    separations, so any pair within ``cell_m`` of each other lands in the
    same or an adjacent cell. ``pairs_at`` therefore returns a superset
    of the pairs within the collision distance whenever
    ``cell_m >= collision_distance_m``.
    """

    _HALF_NEIGHBORHOOD = (1, (1 << 32) - 1, 1 << 32, (1 << 32) + 1)

    def __init__(self, matrix: _TrackMatrix, cell_m: float):
        if cell_m <= 0:
            raise ConfigError(f"cell_m must be positive, got {cell_m}")
        self.matrix = matrix
        self.cell_m = cell_m
        lat, lon = matrix.lat, matrix.lon
        self.max_abs_lat = float(np.nanmax(np.abs(lat))) if matrix.present.any() else 0.0
        cos_ref = math.cos(math.radians(min(self.max_abs_lat, 89.0)))
        y = lat * METERS_PER_DEG_LAT
        x = lon * (METERS_PER_DEG_LAT * cos_ref)
        with np.errstate(invalid="ignore"):
            cy = np.floor((y - np.nanmin(y)) / cell_m) if matrix.present.any() else y
            cx = np.floor((x - np.nanmin(x)) / cell_m) if matrix.present.any() else x
        cy = np.where(np.isnan(cy), 0, cy).astype(np.int64)
        cx = np.where(np.isnan(cx), 0, cx).astype(np.int64)
        self.keys = cx * (1 << 32) + cy  # (T, U)

    def pairs_at(self, tick: int) -> list[tuple[int, int]]:
        """Candidate user-index pairs (i < j) co-located at this tick."""
        p = np.flatnonzero(self.matrix.present[tick])
        if len(p) < 2:
            return []
        keys = self.keys[tick, p]
        order = np.argsort(keys, kind="stable")
        sk = keys[order]
        users = p[order]
        pairs: list[tuple[int, int]] = []

        # same-cell groups
        eq = np.flatnonzero(sk[1:] == sk[:-1])
        if len(eq):
            start = eq[0]
            prev = eq[0]
            for b in list(eq[1:]) + [-2]:
                if b != prev + 1:
                    group = users[start : prev + 2]
                    for i, j in combinations(sorted(group.tolist()), 2):
                        pairs.append((i, j))
                    start = b
                prev = b

        # adjacent cells: half neighborhood so each unordered cell pair is
        # visited once
        for delta in self._HALF_NEIGHBORHOOD:
            lo = np.searchsorted(sk, sk + delta, side="left")
            hi = np.searchsorted(sk, sk + delta, side="right")
            hits = np.flatnonzero(hi > lo)
            for i in hits:
                u = int(users[i])
                for v in users[lo[i] : hi[i]].tolist():
                    pairs.append((u, v) if u < v else (v, u))
        return pairs


def build_candidate_grid(tracks: Mapping[str, ResampledTrack], cell_m: float) -> CandidateGrid:
    """Spatial-hash index over the tracks with the given cell size."""
    return CandidateGrid(_TrackMatrix(tracks), cell_m)


def _runs(ticks: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of consecutive integers, as inclusive (first, last) pairs."""
    if len(ticks) == 0:
        return []
    breaks = np.flatnonzero(np.diff(ticks) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [len(ticks) - 1]))
    return [(int(ticks[s]), int(ticks[e])) for s, e in zip(starts, ends)]


def _build_event(
    matrix: _TrackMatrix,
    ia: int,
    ib: int,
    first: int,
    last: int,
    config: ProximityConfig,
    site_grid: SiteGrid | None,
) -> ContactEvent:
    ticks = np.arange(first, last + 1)
    lat_a = matrix.lat[ticks, ia]
    lon_a = matrix.lon[ticks, ia]
    lat_b = matrix.lat[ticks, ib]
    lon_b = matrix.lon[ticks, ib]
    d = _haversine_m(lat_a, lon_a, lat_b, lon_b)
    k = int(np.argmin(d))
    mid = GeoPoint(float((lat_a[k] + lat_b[k]) / 2.0), float((lon_a[k] + lon_b[k]) / 2.0))
    acc = (matrix.acc[ticks, ia] + matrix.acc[ticks, ib]) / 2.0
    step_ms = config.step_s * 1000
    return ContactEvent(
        user_a=matrix.user_ids[ia],
        user_b=matrix.user_ids[ib],
        t_start=from_ms(matrix.start_ms + first * step_ms),
        t_end=from_ms(matrix.start_ms + last * step_ms),
        duration_s=(last - first) * config.step_s,
        min_distance_m=float(d[k]),
        mean_distance_m=float(d.mean()),
        mean_accuracy_m=float(np.nanmean(acc)) if np.any(~np.isnan(acc)) else float("nan"),
        midpoint=mid,
        site_cell=site_grid.cell_of(mid.lat_deg, mid.lon_deg) if site_grid else None,
        tick_start=first,
        tick_end=last,
    )


def _events_for_pair(
    matrix: _TrackMatrix,
    ia: int,
    ib: int,
    contact_ticks: np.ndarray,
    config: ProximityConfig,
    site_grid: SiteGrid | None,
) -> list[ContactEvent]:
    events = []
    for first, last in _runs(contact_ticks):
        if (last - first) * config.step_s >= config.collision_interval_s:
            events.append(_build_event(matrix, ia, ib, first, last, config, site_grid))
    return events


def _pair_indices(matrix: _TrackMatrix, config: ProximityConfig) -> list[tuple[int, int]]:
    n = len(matrix.user_ids)
    if config.index_user is None:
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    if config.index_user not in matrix.user_ids:
        raise NotFoundError(f"index_user {config.index_user!r} has no track")
    k = matrix.user_ids.index(config.index_user)
    return [(min(i, k), max(i, k)) for i in range(n) if i != k]


def detect_collisions(
    config: ProximityConfig,
    tracks: Mapping[str, ResampledTrack],
    site_grid: SiteGrid | None = None,
    method: str = "grid",
    stats: DetectionStats | None = None,
) -> list[ContactEvent]:
    """Find all qualifying contact events between users on a shared grid.

    ``method`` selects the pruned spatial-hash path ("grid") or the
    all-pairs reference scan ("naive"); both produce identical events.
    When ``config.index_user`` is set only pairs involving that user are
    reported. Events come back sorted by (t_start, user_a, user_b).
    """
    if method not in ("grid", "naive"):
        raise ValueError(f"unknown detection method: {method!r}")
    matrix = _TrackMatrix(tracks)
    matrix.check_config(config)
    if stats is None:
        stats = DetectionStats()
    stats.method = method

    events: list[ContactEvent] = []
    if method == "naive":
        for ia, ib in _pair_indices(matrix, config):
            ticks = np.flatnonzero(matrix.present[:, ia] & matrix.present[:, ib])
            stats.distance_tests += len(ticks)
            stats.pairs_tested += 1
            if len(ticks) == 0:
                continue
            d = _haversine_m(
                matrix.lat[ticks, ia], matrix.lon[ticks, ia], matrix.lat[ticks, ib], matrix.lon[ticks, ib]
            )
            contact = ticks[d <= config.collision_distance_m]
            events.extend(_events_for_pair(matrix, ia, ib, contact, config, site_grid))
    else:
        grid = CandidateGrid(matrix, cell_m=max(2.0 * config.collision_distance_m, 1.0))
        if grid.max_abs_lat > _GRID_MAX_ABS_LAT:
            # longitude projection is not conservative this close to the
            # poles; the naive scan gives the same answer
            return detect_collisions(config, tracks, site_grid, method="naive", stats=stats)
        wanted = set(_pair_indices(matrix, config))
        by_pair: dict[tuple[int, int], list[int]] = {}
        for tick in range(matrix.n_ticks):
            for pair in grid.pairs_at(tick):
                if pair in wanted:
                    by_pair.setdefault(pair, []).append(tick)
        for (ia, ib) in sorted(by_pair):
            ticks = np.asarray(by_pair[(ia, ib)], dtype=np.int64)
            stats.distance_tests += len(ticks)
            stats.pairs_tested += 1
            d = _haversine_m(
                matrix.lat[ticks, ia], matrix.lon[ticks, ia], matrix.lat[ticks, ib], matrix.lon[ticks, ib]
            )
            contact = ticks[d <= config.collision_distance_m]
            events.extend(_events_for_pair(matrix, ia, ib, contact, config, site_grid))

    events.sort(key=lambda e: (e.tick_start, e.user_a, e.user_b))
    stats.events = len(events)
    return events


def pairwise_distance_series(
    user_a: str, user_b: str, tracks: Mapping[str, ResampledTrack]
) -> np.ndarray:
    """Per-tick distance between two users in meters (NaN where either is absent)."""
    for u in (user_a, user_b):
        if u not in tracks:
            raise NotFoundError(f"unknown user: {u!r}")
    ta, tb = tracks[user_a], tracks[user_b]
    if (to_ms(ta.grid_start), ta.step_s, ta.n_ticks) != (to_ms(tb.grid_start), tb.step_s, tb.n_ticks):
        raise ConfigError("tracks are on different grids")
    out = np.full(ta.n_ticks, np.nan)
    both = ta.present() & tb.present()
    ticks = np.flatnonzero(both)
    if len(ticks):
        out[ticks] = _haversine_m(ta.lat[ticks], ta.lon[ticks], tb.lat[ticks], tb.lon[ticks])
    return out
