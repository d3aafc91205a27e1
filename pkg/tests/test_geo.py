import math
import random

import pytest

from campustrace.geo import (
    EARTH_RADIUS_KM,
    GeoPoint,
    equirect_km,
    haversine_km,
    within_threshold_m,
)
from oracles import great_circle_km

# frozen from the 50-digit law-of-cosines oracle before implementation
CAMPUS_PAIR_KM = 3.2847491946321794
ONE_KM_ARC_DEG = 0.009  # (0,0)->(0.009,0) is 1.0007543398 km
DLAT_DEG_0_9M = 8.093894453268575e-6
DLAT_DEG_3M = 2.697964817756192e-5


def test_identical_points_zero():
    p = GeoPoint(3.0, 101.6)
    assert haversine_km(p, p) == 0.0
    assert equirect_km(p, p) == 0.0


def test_antipodal_half_circumference():
    d = haversine_km(GeoPoint(0, 0), GeoPoint(0, 180))
    assert abs(d - 20015.0865) <= 0.001
    assert abs(d - math.pi * EARTH_RADIUS_KM) < 1e-9


def test_campus_endpoints_match_independent_oracle():
    d = haversine_km(GeoPoint(3.024207, 101.612221), GeoPoint(2.996125, 101.621401))
    assert abs(d - CAMPUS_PAIR_KM) / CAMPUS_PAIR_KM < 1e-9


def test_equirect_one_km_meridian_arc():
    d = equirect_km(GeoPoint(0, 0), GeoPoint(ONE_KM_ARC_DEG, 0))
    assert abs(d - 1.0007543398010286) < 1e-9


def test_equirect_close_to_haversine_at_small_separation():
    p1, p2 = GeoPoint(3.0, 101.6), GeoPoint(3.0001, 101.6)
    h = haversine_km(p1, p2)
    e = equirect_km(p1, p2)
    assert abs(e - h) / h < 1e-4


def test_within_threshold_basics():
    p = GeoPoint(2.99, 101.7)
    assert within_threshold_m(p, p, 1.0)
    far = GeoPoint(3.01, 101.7)  # > 2 km north
    assert haversine_km(p, far) > 2.0
    assert not within_threshold_m(p, far, 1.0)


def test_within_threshold_constructed_0_9m_pair():
    p1 = GeoPoint(0.0, 0.0)
    p2 = GeoPoint(DLAT_DEG_0_9M, 0.0)
    assert abs(haversine_km(p1, p2) * 1000 - 0.9) < 1e-6
    assert within_threshold_m(p1, p2, 1.0)
    assert not within_threshold_m(p1, p2, 0.8)


def test_within_threshold_rejects_nonpositive():
    p = GeoPoint(0, 0)
    with pytest.raises(ValueError):
        within_threshold_m(p, p, 0.0)
    with pytest.raises(ValueError):
        within_threshold_m(p, p, -1.0)


def test_geopoint_validation():
    with pytest.raises(ValueError, match="lat_deg"):
        GeoPoint(91.0, 0.0)
    with pytest.raises(ValueError, match="lon_deg"):
        GeoPoint(0.0, -180.5)


def _random_points(rng, n):
    return [GeoPoint(rng.uniform(-90, 90), rng.uniform(-180, 180)) for _ in range(n)]


def test_haversine_matches_oracle_on_random_pairs():
    rng = random.Random(42)
    for _ in range(300):
        a, b = _random_points(rng, 2)
        d = haversine_km(a, b)
        ref = great_circle_km(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg)
        if ref > 0:
            assert abs(d - ref) / ref < 1e-9


def test_symmetry_identity_and_range():
    rng = random.Random(1)
    for _ in range(500):
        a, b = _random_points(rng, 2)
        ab = haversine_km(a, b)
        assert ab == haversine_km(b, a)
        assert 0.0 <= ab <= math.pi * EARTH_RADIUS_KM + 1e-12
        assert haversine_km(a, a) == 0.0


def test_triangle_inequality():
    rng = random.Random(2)
    for _ in range(300):
        a, b, c = _random_points(rng, 3)
        assert haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-9


def test_equirect_agreement_under_5km_away_from_poles():
    rng = random.Random(3)
    checked = 0
    while checked < 300:
        lat = rng.uniform(-60, 60)
        lon = rng.uniform(-179, 179)
        dlat = rng.uniform(-0.02, 0.02)
        dlon = rng.uniform(-0.02, 0.02)
        a = GeoPoint(lat, lon)
        b = GeoPoint(lat + dlat, lon + dlon)
        h = haversine_km(a, b)
        if not 0 < h < 5.0 or abs(b.lat_deg) >= 60:
            continue
        checked += 1
        assert abs(equirect_km(a, b) - h) / h < 0.01
