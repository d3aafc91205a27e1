"""Parsing and normalization of Google Takeout location-history exports.

Two input shapes are supported:

* raw records: a JSON document with a top-level ``locations`` array whose
  entries carry ``latitudeE7``/``longitudeE7`` (fixed-point degrees x 1e7),
  a timestamp (either millisecond ``timestampMs`` or an RFC 3339
  ``timestamp``), and an ``accuracy`` in meters;
* semantic activity segments: ``timelineObjects`` entries with an
  ``activitySegment`` holding start/end E7 locations, start/end timestamps,
  a distance, an activity type, and a confidence label.

Parsing never invents data: entries missing mandatory fields are counted
and skipped, and segments whose end precedes their start are kept but
flagged anomalous so analysts can audit source quality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Sequence

from .errors import ParseError
from .geo import GeoPoint

E7_SCALE = 10**7

# Accuracy bands in meters: below 800 the fix is treated as high precision,
# above 5000 as unusable.
ACCURACY_HIGH_BELOW_M = 800
ACCURACY_POOR_ABOVE_M = 5000

# Millisecond timestamps with exactly 13 decimal digits (years 2001-2286).
_TS_MS_MIN = 10**12
_TS_MS_MAX = 10**13 - 1

CONFIDENCE_LEVELS = ("LOW", "MEDIUM", "HIGH")


@dataclass(frozen=True)
class RawLocationRecord:
    """One location entry exactly as it appears in the export."""

    latitude_e7: int
    longitude_e7: int
    timestamp_ms: int
    accuracy_m: int = 0
    heading_deg: int | None = None
    altitude_m: int | None = None
    activity_type: str | None = None
    activity_confidence: int | None = None


@dataclass(frozen=True)
class LocationSample:
    """A validated, normalized geo-fix for one user."""

    user_id: str
    time_utc: datetime
    point: GeoPoint
    accuracy_m: float
    accuracy_band: str
    activity_type: str | None = None


@dataclass(frozen=True)
class ActivitySegment:
    """One semantic travel segment (start -> end with a transport mode)."""

    user_id: str
    start_point: GeoPoint
    end_point: GeoPoint
    start_time: datetime
    end_time: datetime
    distance_m: int
    activity_type: str
    confidence: str
    anomalous: bool = False


@dataclass
class LocationParseResult:
    """Records parsed from one document plus the skip accounting."""

    records: list[RawLocationRecord]
    skipped: int

    @property
    def total(self) -> int:
        return len(self.records) + self.skipped


@dataclass
class FilterResult:
    samples: list[LocationSample]
    kept: int
    dropped: int


def accuracy_band(accuracy_m: float) -> str:
    """Band an accuracy value: high below 800 m, poor above 5000 m."""
    if accuracy_m < ACCURACY_HIGH_BELOW_M:
        return "high"
    if accuracy_m > ACCURACY_POOR_ABOVE_M:
        return "poor"
    return "medium"


def _load_json(data: bytes | str | IO) -> object:
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON document: {exc.msg} at offset {exc.pos}", offset=exc.pos) from exc


def _parse_instant_ms(entry: dict) -> int | None:
    """Millisecond epoch time from either a timestampMs or RFC 3339 field."""
    raw_ms = entry.get("timestampMs")
    if raw_ms is not None:
        return int(raw_ms)
    raw_iso = entry.get("timestamp")
    if raw_iso is None:
        return None
    text = raw_iso.replace("Z", "+00:00")
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return round(dt.timestamp() * 1000)


def parse_location_records(data: bytes | str | IO) -> LocationParseResult:
    """Parse a raw-records document into :class:`RawLocationRecord` values.

    Entries missing any of the mandatory fields (latitudeE7, longitudeE7,
    timestamp) are skipped and counted; file order is preserved.
    """
    doc = _load_json(data)
    if not isinstance(doc, dict) or not isinstance(doc.get("locations"), list):
        raise ParseError('document has no top-level "locations" array')

    records: list[RawLocationRecord] = []
    skipped = 0
    for entry in doc["locations"]:
        if not isinstance(entry, dict):
            skipped += 1
            continue
        lat_e7 = entry.get("latitudeE7")
        lon_e7 = entry.get("longitudeE7")
        ts_ms = _parse_instant_ms(entry)
        if lat_e7 is None or lon_e7 is None or ts_ms is None:
            skipped += 1
            continue
        activity_type, activity_conf = _top_activity(entry.get("activity"))
        records.append(
            RawLocationRecord(
                latitude_e7=int(lat_e7),
                longitude_e7=int(lon_e7),
                timestamp_ms=ts_ms,
                accuracy_m=int(entry.get("accuracy", 0)),
                heading_deg=entry.get("heading"),
                altitude_m=entry.get("altitude"),
                activity_type=activity_type,
                activity_confidence=activity_conf,
            )
        )
    return LocationParseResult(records=records, skipped=skipped)


def _top_activity(activity_entries) -> tuple[str | None, int | None]:
    """Highest-confidence activity guess from a raw record's activity list."""
    if not isinstance(activity_entries, list) or not activity_entries:
        return None, None
    first = activity_entries[0]
    guesses = first.get("activity") if isinstance(first, dict) else None
    if not isinstance(guesses, list) or not guesses:
        return None, None
    best = max(guesses, key=lambda g: g.get("confidence", 0))
    return best.get("type"), best.get("confidence")


def normalize(record: RawLocationRecord, user_id: str) -> LocationSample:
    """Turn a raw record into a validated :class:`LocationSample`.

    E7 coordinates are scaled to degrees; the timestamp is interpreted
    as a UTC instant. Out-of-range values raise ValueError naming the
    offending field.
    """
    if not -90 * E7_SCALE <= record.latitude_e7 <= 90 * E7_SCALE:
        raise ValueError(f"latitude_e7 out of range: {record.latitude_e7}")
    if not -180 * E7_SCALE <= record.longitude_e7 <= 180 * E7_SCALE:
        raise ValueError(f"longitude_e7 out of range: {record.longitude_e7}")
    if not _TS_MS_MIN <= record.timestamp_ms <= _TS_MS_MAX:
        raise ValueError(f"timestamp_ms outside the 13-digit era (2001-2286): {record.timestamp_ms}")
    if record.accuracy_m < 0:
        raise ValueError(f"accuracy_m must be non-negative: {record.accuracy_m}")
    return LocationSample(
        user_id=user_id,
        time_utc=datetime.fromtimestamp(record.timestamp_ms / 1000.0, tz=timezone.utc),
        point=GeoPoint(record.latitude_e7 / E7_SCALE, record.longitude_e7 / E7_SCALE),
        accuracy_m=float(record.accuracy_m),
        accuracy_band=accuracy_band(record.accuracy_m),
        activity_type=record.activity_type,
    )


def filter_by_accuracy(samples: Iterable[LocationSample], policy: str = "drop_poor") -> FilterResult:
    """Apply an accuracy-band keep/drop policy, preserving order.

    Policies: ``drop_poor`` (default) removes the poor band only,
    ``high_only`` keeps the high band only, ``keep_all`` is a no-op.
    """
    if policy not in ("drop_poor", "keep_all", "high_only"):
        raise ValueError(f"unknown accuracy policy: {policy!r}")
    kept: list[LocationSample] = []
    dropped = 0
    for s in samples:
        if policy == "drop_poor" and s.accuracy_band == "poor":
            dropped += 1
        elif policy == "high_only" and s.accuracy_band != "high":
            dropped += 1
        else:
            kept.append(s)
    return FilterResult(samples=kept, kept=len(kept), dropped=dropped)


def _parse_segment_entry(seg: dict, user_id: str) -> ActivitySegment:
    start_loc = seg["startLocation"]
    end_loc = seg["endLocation"]
    duration = seg.get("duration", seg)
    start_ms = _parse_instant_ms(
        {"timestampMs": duration.get("startTimestampMs"), "timestamp": duration.get("startTimestamp")}
    )
    end_ms = _parse_instant_ms(
        {"timestampMs": duration.get("endTimestampMs"), "timestamp": duration.get("endTimestamp")}
    )
    if start_ms is None or end_ms is None:
        raise ParseError("activity segment missing start/end timestamps")
    confidence = seg.get("confidence")
    if confidence not in CONFIDENCE_LEVELS:
        raise ParseError(f"unknown confidence label: {confidence!r} (expected one of {CONFIDENCE_LEVELS})")
    distance_m = int(seg.get("distance", 0))
    if distance_m < 0:
        raise ParseError(f"negative segment distance: {distance_m}")
    start_time = datetime.fromtimestamp(start_ms / 1000.0, tz=timezone.utc)
    end_time = datetime.fromtimestamp(end_ms / 1000.0, tz=timezone.utc)
    return ActivitySegment(
        user_id=user_id,
        start_point=GeoPoint(int(start_loc["latitudeE7"]) / E7_SCALE, int(start_loc["longitudeE7"]) / E7_SCALE),
        end_point=GeoPoint(int(end_loc["latitudeE7"]) / E7_SCALE, int(end_loc["longitudeE7"]) / E7_SCALE),
        start_time=start_time,
        end_time=end_time,
        distance_m=distance_m,
        activity_type=str(seg.get("activityType", "UNKNOWN")),
        confidence=confidence,
        anomalous=end_time < start_time,
    )


def parse_activity_segments(data: bytes | str | IO, user_id: str) -> list[ActivitySegment]:
    """Parse a semantic-history document into activity segments.

    Accepts the ``timelineObjects`` layout (placeVisit entries are
    ignored) or a bare list of segment objects. Segments whose end
    precedes their start are kept and flagged ``anomalous`` rather than
    silently reordered.
    """
    doc = _load_json(data)
    if isinstance(doc, dict) and isinstance(doc.get("timelineObjects"), list):
        entries = [obj["activitySegment"] for obj in doc["timelineObjects"] if "activitySegment" in obj]
    elif isinstance(doc, list):
        entries = doc
    else:
        raise ParseError('document has neither "timelineObjects" nor a segment array')
    return [_parse_segment_entry(seg, user_id) for seg in entries]
