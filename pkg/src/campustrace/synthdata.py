"""Deterministic synthetic campus datasets with scripted encounters.

The generator writes per-user Takeout-format location files plus a
ground-truth manifest of every scripted encounter. Construction
guarantees make the manifest usable as an exact oracle:

* encounter participants sit at a dedicated meeting site, a fixed
  distance apart, for exactly the scripted grid-aligned interval;
* outside encounters every user wanders only inside a private zone, and
  zones are laid out so unscripted pairs never come within the
  guaranteed background separation (default 160 m);
* approach/departure legs are bounded so interpolated positions between
  fixes never dip inside the separation guarantee either.

Files are byte-identical for identical scripts (seeded RNG, integer E7
coordinates, canonical JSON).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .geo import GeoPoint, METERS_PER_DEG_LAT, haversine_km
from .timeutil import from_ms, iso_utc, to_ms

# Campus anchor (flat equatorial latitude keeps lon/lat scaling simple).
_BASE_LAT_E7 = 29_970_000
_BASE_LON_E7 = 1_017_070_000

_ZONE_SPACING_M = 200.0
_ZONE_WANDER_M = 20.0
_SITE_ROW_OFFSET_M = -400.0

# Zones are 200 m apart and wander is +-20 m, so unscripted pairs stay
# at least this far apart.
BACKGROUND_SEPARATION_M = _ZONE_SPACING_M - 2 * _ZONE_WANDER_M

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class ScriptedEncounter:
    """One engineered meeting: a pair, a start offset, a duration, a distance."""

    user_a: str
    user_b: str
    start_offset_s: int
    duration_s: int
    distance_m: float


@dataclass
class EncounterScript:
    """Full recipe for one synthetic dataset."""

    seed: int = 7
    n_users: int = 50
    start: datetime = datetime(2022, 4, 14, tzinfo=timezone.utc)
    days: int = 14
    step_s: int = 60
    fix_interval_s: int = 300
    encounters: list[ScriptedEncounter] = field(default_factory=list)

    @property
    def window_s(self) -> int:
        return self.days * 86400

    def user_ids(self) -> list[str]:
        return [f"U{i:02d}" for i in range(self.n_users)]


class ScriptError(ValueError):
    """The script cannot be realized as consistent trajectories."""


def _validate(script: EncounterScript) -> None:
    users = set(script.user_ids())
    if script.fix_interval_s % script.step_s != 0:
        raise ScriptError("fix_interval_s must be a multiple of step_s")
    padded: dict[str, list[tuple[int, int, ScriptedEncounter]]] = {}
    for enc in script.encounters:
        if enc.user_a == enc.user_b:
            raise ScriptError(f"self-encounter for {enc.user_a}")
        for u in (enc.user_a, enc.user_b):
            if u not in users:
                raise ScriptError(f"encounter names unknown user {u!r}")
        if enc.start_offset_s % script.step_s or enc.duration_s % script.step_s:
            raise ScriptError(
                f"encounter {enc.user_a}-{enc.user_b} at +{enc.start_offset_s}s is not grid-aligned"
            )
        if enc.start_offset_s < 0 or enc.start_offset_s + enc.duration_s > script.window_s - script.step_s:
            raise ScriptError(f"encounter {enc.user_a}-{enc.user_b} falls outside the window")
        if not 0 < enc.distance_m <= 50:
            raise ScriptError(f"encounter distance {enc.distance_m} m is not in (0, 50]")
        span = (
            enc.start_offset_s - script.fix_interval_s,
            enc.start_offset_s + enc.duration_s + script.fix_interval_s,
        )
        for u in (enc.user_a, enc.user_b):
            for lo, hi, other in padded.get(u, []):
                if span[0] < hi and lo < span[1]:
                    raise ScriptError(
                        f"user {u} cannot attend encounters {other.user_a}-{other.user_b} "
                        f"(+{other.start_offset_s}s) and {enc.user_a}-{enc.user_b} "
                        f"(+{enc.start_offset_s}s): padded intervals overlap"
                    )
            padded.setdefault(u, []).append((span[0], span[1], enc))


def _e7_per_meter_lon(lat_e7: int) -> float:
    return 1e7 / (METERS_PER_DEG_LAT * math.cos(math.radians(lat_e7 / 1e7)))


_E7_PER_M_LAT = 1e7 / METERS_PER_DEG_LAT
_E7_PER_M_LON = _e7_per_meter_lon(_BASE_LAT_E7)


def _zone_center(i: int, cols: int) -> tuple[int, int]:
    row, col = divmod(i, cols)
    lat = _BASE_LAT_E7 + round(row * _ZONE_SPACING_M * _E7_PER_M_LAT)
    lon = _BASE_LON_E7 + round(col * _ZONE_SPACING_M * _E7_PER_M_LON)
    return lat, lon


def _site_center(k: int) -> tuple[int, int]:
    lat = _BASE_LAT_E7 + round(_SITE_ROW_OFFSET_M * _E7_PER_M_LAT)
    lon = _BASE_LON_E7 + round(k * _ZONE_SPACING_M * _E7_PER_M_LON)
    return lat, lon


def _realized_distance_m(a: tuple[int, int], b: tuple[int, int]) -> float:
    return haversine_km(GeoPoint(a[0] / 1e7, a[1] / 1e7), GeoPoint(b[0] / 1e7, b[1] / 1e7)) * 1000.0


def generate(script: EncounterScript, out_dir: str | Path) -> dict:
    """Write per-user Takeout files plus the ground-truth manifest.

    Returns the manifest dict (also saved as ``manifest.json``). Raises
    :class:`ScriptError` when the script cannot be realized.
    """
    _validate(script)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    user_ids = script.user_ids()
    cols = max(1, math.ceil(math.sqrt(script.n_users)))
    start_ms = to_ms(script.start)

    # per-encounter meeting positions, E7-exact
    site_positions: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for k, enc in enumerate(script.encounters):
        center = _site_center(k)
        partner = (center[0] + round(enc.distance_m * _E7_PER_M_LAT), center[1])
        site_positions.append((center, partner))

    # encounter fix schedule per user: time_s -> (lat_e7, lon_e7)
    enc_fixes: dict[str, dict[int, tuple[int, int]]] = {u: {} for u in user_ids}
    enc_spans: dict[str, list[tuple[int, int]]] = {u: [] for u in user_ids}
    for k, enc in enumerate(script.encounters):
        t0, t1 = enc.start_offset_s, enc.start_offset_s + enc.duration_s
        times = list(range(t0, t1, script.fix_interval_s)) + [t1]
        pos_a, pos_b = site_positions[k]
        for u, pos in ((enc.user_a, pos_a), (enc.user_b, pos_b)):
            for t in times:
                enc_fixes[u][t] = pos
            enc_spans[u].append((t0, t1))

    files: dict[str, str] = {}
    for i, uid in enumerate(user_ids):
        rng = random.Random(f"{script.seed}:{uid}")
        zone_lat, zone_lon = _zone_center(i, cols)
        wander_e7_lat = round(_ZONE_WANDER_M * _E7_PER_M_LAT)
        wander_e7_lon = round(_ZONE_WANDER_M * _E7_PER_M_LON)
        here = (zone_lat, zone_lon)
        records = []

        def emit(t_s: int, pos: tuple[int, int], accuracy: int) -> None:
            records.append(
                {
                    "latitudeE7": pos[0],
                    "longitudeE7": pos[1],
                    "timestampMs": str(start_ms + t_s * 1000),
                    "accuracy": accuracy,
                }
            )

        for t in range(0, script.window_s, script.fix_interval_s):
            if any(lo <= t <= hi for lo, hi in enc_spans[uid]):
                continue  # the encounter schedule owns this stretch
            if rng.random() < 0.3:
                here = (
                    zone_lat + rng.randint(-wander_e7_lat, wander_e7_lat),
                    zone_lon + rng.randint(-wander_e7_lon, wander_e7_lon),
                )
            roll = rng.random()
            if roll < 0.005:
                accuracy = rng.randint(5001, 9000)  # poor: dropped by default policy
            elif roll < 0.03:
                accuracy = rng.randint(800, 2000)  # medium: kept
            else:
                accuracy = rng.randint(10, 60)
            emit(t, here, accuracy)
        for t in sorted(enc_fixes[uid]):
            emit(t, enc_fixes[uid][t], rng.randint(10, 30))
        records.sort(key=lambda r: int(r["timestampMs"]))

        fname = f"{uid}.json"
        with open(out / fname, "w") as fh:
            json.dump({"locations": records}, fh, sort_keys=True, separators=(",", ":"))
        files[uid] = fname

    manifest = {
        "seed": script.seed,
        "users": user_ids,
        "files": files,
        "window": {
            "start": iso_utc(script.start),
            "days": script.days,
            "step_s": script.step_s,
            "fix_interval_s": script.fix_interval_s,
        },
        "background_separation_m": BACKGROUND_SEPARATION_M,
        "encounters": [
            {
                "user_a": min(e.user_a, e.user_b),
                "user_b": max(e.user_a, e.user_b),
                "start_offset_s": e.start_offset_s,
                "duration_s": e.duration_s,
                "scripted_distance_m": e.distance_m,
                "realized_distance_m": _realized_distance_m(*site_positions[k]),
                "t_start": iso_utc(from_ms(start_ms + e.start_offset_s * 1000)),
                "t_end": iso_utc(from_ms(start_ms + (e.start_offset_s + e.duration_s) * 1000)),
            }
            for k, e in enumerate(script.encounters)
        ],
    }
    with open(out / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def expected_events(manifest: dict, collision_distance_m: float, collision_interval_s: int) -> list[dict]:
    """Manifest entries that must surface as events at the given thresholds.

    Sorted the way the detector reports: (t_start, user_a, user_b).
    """
    hits = [
        e
        for e in manifest["encounters"]
        if e["realized_distance_m"] <= collision_distance_m and e["duration_s"] >= collision_interval_s
    ]
    return sorted(hits, key=lambda e: (e["t_start"], e["user_a"], e["user_b"]))


def default_script(seed: int = 7, n_users: int = 50, days: int = 14) -> EncounterScript:
    """The stock 50-user campus script with a 3-level transmission chain.

    U00 meets U01 (day 1), U01 meets U02 (day 3), U02 meets U03 (day 5):
    levels 1, 2, 3 from index U00. Extra encounters cover repeat
    contacts, sub-interval brushes, and wider-distance meetings.
    """
    day = 86400
    encounters = [
        # 3-level chain (each 30 min at 0.5 m)
        ScriptedEncounter("U00", "U01", 1 * day + 9 * 3600, 1800, 0.5),
        ScriptedEncounter("U01", "U02", 3 * day + 14 * 3600, 1800, 0.5),
        ScriptedEncounter("U02", "U03", 5 * day + 11 * 3600, 1800, 0.5),
        # second direct contact of the index case
        ScriptedEncounter("U00", "U04", 2 * day + 10 * 3600, 1200, 0.8),
        # repeat meeting of an existing pair, later in the window
        ScriptedEncounter("U00", "U01", 8 * day + 9 * 3600, 900, 0.9),
        # too short to qualify at the default 300 s interval
        ScriptedEncounter("U05", "U06", 4 * day + 12 * 3600, 240, 0.5),
        # beyond a 1 m threshold, inside a 10 m one
        ScriptedEncounter("U07", "U08", 6 * day + 15 * 3600, 1800, 5.0),
        ScriptedEncounter("U09", "U10", 7 * day + 8 * 3600, 3600, 9.5),
        # fringe of the 1 m threshold
        ScriptedEncounter("U11", "U12", 9 * day + 13 * 3600, 1500, 0.95),
        # long study session
        ScriptedEncounter("U13", "U14", 10 * day + 19 * 3600, 7200, 0.4),
    ]
    encounters = [
        e
        for e in encounters
        if {int(e.user_a[1:]), int(e.user_b[1:])} <= set(range(n_users))
        and e.start_offset_s + e.duration_s < days * day - 60
    ]
    return EncounterScript(seed=seed, n_users=n_users, days=days, encounters=encounters)
