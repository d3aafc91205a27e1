"""Geodesic distance primitives on the 6371 km sphere.

Everything downstream (proximity detection, contact scoring, exports)
measures distance through this module. Inputs are always degrees; the
degree-to-radian conversion happens here so callers never mix units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_KM = 6371.0

# Meridian arc length of one degree of latitude on the sphere, in meters.
METERS_PER_DEG_LAT = EARTH_RADIUS_KM * 1000.0 * math.pi / 180.0


@dataclass(frozen=True)
class GeoPoint:
    """A latitude/longitude pair in decimal degrees."""

    lat_deg: float
    lon_deg: float

    def __post_init__(self):
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"lat_deg out of range [-90, 90]: {self.lat_deg}")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ValueError(f"lon_deg out of range [-180, 180]: {self.lon_deg}")


def haversine_km(p1: GeoPoint, p2: GeoPoint) -> float:
    """Great-circle distance between two points in kilometers.

    Uses the atan2 form, which stays well-conditioned for antipodal and
    near-identical points. Result is in [0, pi * R].
    """
    lat1 = math.radians(p1.lat_deg)
    lat2 = math.radians(p2.lat_deg)
    dlat = math.radians(p2.lat_deg - p1.lat_deg)
    dlon = math.radians(p2.lon_deg - p1.lon_deg)
    a = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    c = 2.0 * math.atan2(math.sqrt(a), math.sqrt(max(0.0, 1.0 - a)))
    return EARTH_RADIUS_KM * c


def equirect_km(p1: GeoPoint, p2: GeoPoint) -> float:
    """Flat-earth (equirectangular) distance in kilometers.

    Pythagorean approximation on a plane tangent at the mean latitude.
    Cheap and accurate to well under 1% for separations below a few tens
    of kilometers away from the poles; use as a pre-filter, not as the
    authoritative distance (that is :func:`haversine_km`).
    """
    mean_lat = math.radians((p1.lat_deg + p2.lat_deg) / 2.0)
    x = math.radians(p2.lon_deg - p1.lon_deg) * math.cos(mean_lat)
    y = math.radians(p2.lat_deg - p1.lat_deg)
    return EARTH_RADIUS_KM * math.sqrt(x * x + y * y)


def within_threshold_m(p1: GeoPoint, p2: GeoPoint, threshold_m: float) -> bool:
    """True iff the great-circle distance is at most ``threshold_m`` meters."""
    if threshold_m <= 0:
        raise ValueError(f"threshold_m must be positive, got {threshold_m}")
    return haversine_km(p1, p2) * 1000.0 <= threshold_m
