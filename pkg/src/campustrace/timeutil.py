"""Millisecond-epoch helpers.

The store and the proximity engine do their arithmetic on integer epoch
milliseconds (exact, fast to vectorize); datetimes appear only at the
edges. Everything is UTC.
"""

from __future__ import annotations

from datetime import datetime, timezone


def to_ms(dt: datetime) -> int:
    """UTC epoch milliseconds for a datetime (naive values are taken as UTC)."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return round(dt.timestamp() * 1000)


def from_ms(ms: int) -> datetime:
    return datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)


def iso_utc(dt: datetime) -> str:
    """Compact ISO-8601 UTC rendering with a Z suffix, second precision."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    dt = dt.astimezone(timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f").rstrip("0") + "Z"
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
