"""Serialization of segments, tracks, events, level reports, and epidemic series.

Output formats: CSV (comma, UTF-8, header row), KML 2.2, and GeoJSON
FeatureCollections (tracks as LineStrings, contact events as Points) for
map clients. All output is deterministic for identical inputs: stable
sort keys and fixed numeric formatting. Machine timestamps are UTC
ISO-8601 throughout; presentation-side localization is the UI's job.

Degree formatting comes in two flavors: the segments CSV preserves the
source's E7 fixed-point precision exactly (so parse -> export -> parse
round-trips field-for-field), while map-facing exports round to 6
decimal places (about 0.11 m, plenty under a 1 m analysis threshold).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

from .epidemic import EpidemicSeries
from .errors import ParseError
from .geo import GeoPoint
from .proximity import ContactEvent
from .store import SiteGrid
from .takeout import ActivitySegment, E7_SCALE
from .timeutil import iso_utc, to_ms
from .tracing import ContactLevelRecord

SEGMENT_CSV_HEADER = [
    "UserID",
    "start_location_Lat",
    "start_location_Long",
    "end_location_Lat",
    "end_location_Long",
    "duration_Start",
    "duration_End",
    "distance",
    "activityType",
    "confidence",
]

EVENT_CSV_HEADER = [
    "user_a",
    "user_b",
    "t_start",
    "t_end",
    "duration_s",
    "min_distance_m",
    "mean_distance_m",
    "mean_accuracy_m",
    "site_cell",
]

REPORT_CSV_HEADER = ["user_id", "date", "time", "latitude", "longitude", "visited_location", "contact_level"]


def fmt_deg_e7(value: float) -> str:
    """Degrees at E7 precision, trailing zeros trimmed (min one decimal)."""
    e7 = round(value * E7_SCALE)
    sign = "-" if e7 < 0 else ""
    whole, frac = divmod(abs(e7), E7_SCALE)
    digits = f"{frac:07d}".rstrip("0") or "0"
    return f"{sign}{whole}.{digits}"


def fmt_deg6(value: float) -> str:
    return f"{value:.6f}"


# -- activity segments ---------------------------------------------------


def segments_to_csv(segments: Iterable[ActivitySegment]) -> str:
    """Tabular segment export: one row per segment, stable order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SEGMENT_CSV_HEADER)
    for s in segments:
        writer.writerow(
            [
                s.user_id,
                fmt_deg_e7(s.start_point.lat_deg),
                fmt_deg_e7(s.start_point.lon_deg),
                fmt_deg_e7(s.end_point.lat_deg),
                fmt_deg_e7(s.end_point.lon_deg),
                iso_utc(s.start_time),
                iso_utc(s.end_time),
                s.distance_m,
                s.activity_type,
                s.confidence,
            ]
        )
    return buf.getvalue()


def segments_from_csv(data: str) -> list[ActivitySegment]:
    """Inverse of :func:`segments_to_csv` (exact round trip)."""
    from datetime import datetime

    reader = csv.DictReader(io.StringIO(data))
    if reader.fieldnames != SEGMENT_CSV_HEADER:
        raise ParseError(f"unexpected segment CSV header: {reader.fieldnames}")
    out = []
    for row in reader:
        start_time = datetime.fromisoformat(row["duration_Start"].replace("Z", "+00:00"))
        end_time = datetime.fromisoformat(row["duration_End"].replace("Z", "+00:00"))
        out.append(
            ActivitySegment(
                user_id=row["UserID"],
                start_point=GeoPoint(float(row["start_location_Lat"]), float(row["start_location_Long"])),
                end_point=GeoPoint(float(row["end_location_Lat"]), float(row["end_location_Long"])),
                start_time=start_time,
                end_time=end_time,
                distance_m=int(row["distance"]),
                activity_type=row["activityType"],
                confidence=row["confidence"],
                anomalous=end_time < start_time,
            )
        )
    return out


# -- contact events --------------------------------------------------------


def events_to_csv(events: Iterable[ContactEvent]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVENT_CSV_HEADER)
    for e in events:
        writer.writerow(
            [
                e.user_a,
                e.user_b,
                iso_utc(e.t_start),
                iso_utc(e.t_end),
                e.duration_s,
                f"{e.min_distance_m:.6f}",
                f"{e.mean_distance_m:.6f}",
                f"{e.mean_accuracy_m:.2f}",
                SiteGrid.label(e.site_cell) if e.site_cell else "",
            ]
        )
    return buf.getvalue()


def event_to_dict(e: ContactEvent) -> dict:
    return {
        "user_a": e.user_a,
        "user_b": e.user_b,
        "t_start": iso_utc(e.t_start),
        "t_end": iso_utc(e.t_end),
        "duration_s": e.duration_s,
        "min_distance_m": e.min_distance_m,
        "mean_distance_m": e.mean_distance_m,
        "mean_accuracy_m": e.mean_accuracy_m,
        "midpoint": {"lat": e.midpoint.lat_deg, "lon": e.midpoint.lon_deg},
        "site_cell": list(e.site_cell) if e.site_cell else None,
        "event_id": e.event_id,
    }


# -- level report ------------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    """One screening-table line (the six result fields plus the user id)."""

    user_id: str
    date: str
    time: str
    latitude: float
    longitude: float
    visited_location: str
    contact_level: int


def level_report(
    records: Iterable[ContactLevelRecord],
    events: Iterable[ContactEvent],
    site_grid: SiteGrid | None = None,
) -> list[ReportRow]:
    """Rows in screening order, located at each first-contact event midpoint."""
    from .tracing import screening_order

    by_id = {e.event_id: e for e in events}
    rows = []
    for rec in screening_order(records).records:
        event = by_id.get(rec.event_ref)
        if event is None:
            raise ValueError(f"level record for {rec.user_id} references unknown event {rec.event_ref!r}")
        cell = event.site_cell
        if cell is None and site_grid is not None:
            cell = site_grid.cell_of(event.midpoint.lat_deg, event.midpoint.lon_deg)
        stamp = rec.first_contact_time
        rows.append(
            ReportRow(
                user_id=rec.user_id,
                date=stamp.strftime("%Y-%m-%d"),
                time=stamp.strftime("%H:%M:%S"),
                latitude=round(event.midpoint.lat_deg, 6),
                longitude=round(event.midpoint.lon_deg, 6),
                visited_location=SiteGrid.label(cell) if cell else "",
                contact_level=rec.level,
            )
        )
    return rows


def report_to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_CSV_HEADER)
    for r in rows:
        writer.writerow(
            [r.user_id, r.date, r.time, fmt_deg6(r.latitude), fmt_deg6(r.longitude), r.visited_location, r.contact_level]
        )
    return buf.getvalue()


def row_to_dict(r: ReportRow) -> dict:
    return {
        "user_id": r.user_id,
        "date": r.date,
        "time": r.time,
        "latitude": r.latitude,
        "longitude": r.longitude,
        "visited_location": r.visited_location,
        "contact_level": r.contact_level,
    }


# -- KML ----------------------------------------------------------------------


def tracks_to_kml(tracks: Mapping[str, Sequence[GeoPoint]], events: Iterable[ContactEvent]) -> str:
    """KML 2.2: a LineString placemark per track, a Point per contact event.

    KML coordinate tuples are longitude,latitude order.
    """
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<kml xmlns="http://www.opengis.net/kml/2.2">',
        "  <Document>",
        "    <name>campus traces</name>",
        "    <Folder>",
        "      <name>tracks</name>",
    ]
    for user_id in sorted(tracks):
        coords = " ".join(f"{fmt_deg6(p.lon_deg)},{fmt_deg6(p.lat_deg)}" for p in tracks[user_id])
        lines += [
            "      <Placemark>",
            f"        <name>{escape(user_id)}</name>",
            "        <LineString>",
            f"          <coordinates>{coords}</coordinates>",
            "        </LineString>",
            "      </Placemark>",
        ]
    lines += ["    </Folder>", "    <Folder>", "      <name>contacts</name>"]
    for e in events:
        name = f"{e.user_a} x {e.user_b} @ {iso_utc(e.t_start)}"
        lines += [
            "      <Placemark>",
            f"        <name>{escape(name)}</name>",
            "        <Point>",
            f"          <coordinates>{fmt_deg6(e.midpoint.lon_deg)},{fmt_deg6(e.midpoint.lat_deg)}</coordinates>",
            "        </Point>",
            "      </Placemark>",
        ]
    lines += ["    </Folder>", "  </Document>", "</kml>", ""]
    return "\n".join(lines)


# -- GeoJSON --------------------------------------------------------------------


def to_geojson(
    tracks: Mapping[str, Sequence[GeoPoint]],
    events: Iterable[ContactEvent],
    levels: Mapping[str, int] | None = None,
) -> str:
    """FeatureCollection of user tracks (LineString) and events (Point).

    When a user -> level mapping is given, each event point carries the
    deeper of its two participants' levels (the index case counts as 0).
    """
    features = []
    for user_id in sorted(tracks):
        coords = [[round(p.lon_deg, 6), round(p.lat_deg, 6)] for p in tracks[user_id]]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": coords},
                "properties": {"kind": "track", "user_id": user_id},
            }
        )
    for e in events:
        props = {
            "kind": "contact",
            "user_a": e.user_a,
            "user_b": e.user_b,
            "t_start": iso_utc(e.t_start),
            "t_end": iso_utc(e.t_end),
            "min_distance_m": round(e.min_distance_m, 3),
        }
        if levels is not None:
            known = [levels.get(u, 0) for u in (e.user_a, e.user_b)]
            props["level"] = max(known)
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [round(e.midpoint.lon_deg, 6), round(e.midpoint.lat_deg, 6)],
                },
                "properties": props,
            }
        )
    return json.dumps({"type": "FeatureCollection", "features": features}, sort_keys=True, separators=(",", ":"))


# -- epidemic series ---------------------------------------------------------------


def series_to_csv(series: EpidemicSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "s", "e", "i", "r"])
    for st in series.states:
        writer.writerow([repr(st.t), repr(st.s), repr(st.e), repr(st.i), repr(st.r)])
    return buf.getvalue()
