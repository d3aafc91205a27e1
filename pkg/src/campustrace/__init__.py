"""campustrace: campus contact-tracing from location-history exports.

Ingests Google Takeout location data, detects proximity collisions
between users, classifies Level-1/2/3 contacts with screening
priorities, computes direct/indirect contact scores, and simulates
SIR/SEIR outbreaks under mobility-restriction policies.
"""

from .epidemic import EpidemicParams, EpidemicState, derivatives, mu_sweep, simulate
from .errors import CampusTraceError, ConfigError, NotFoundError, ParseError
from .geo import EARTH_RADIUS_KM, GeoPoint, equirect_km, haversine_km, within_threshold_m
from .proximity import (
    ContactEvent,
    DetectionStats,
    ProximityConfig,
    build_candidate_grid,
    detect_collisions,
    pairwise_distance_series,
)
from .scoring import (
    ContactScore,
    MobilityMatrix,
    ScoreParams,
    build_mobility_matrix,
    direct_contact_score,
    indirect_contact_score,
)
from .store import SiteCell, SiteGrid, Trajectory, TrajectoryStore
from .takeout import (
    ActivitySegment,
    LocationSample,
    RawLocationRecord,
    accuracy_band,
    filter_by_accuracy,
    normalize,
    parse_activity_segments,
    parse_location_records,
)
from .tracing import ContactLevelRecord, ScreeningPlan, screening_order, trace_levels

__version__ = "0.1.0"

__all__ = [
    "ActivitySegment",
    "CampusTraceError",
    "ConfigError",
    "ContactEvent",
    "ContactLevelRecord",
    "ContactScore",
    "DetectionStats",
    "EARTH_RADIUS_KM",
    "EpidemicParams",
    "EpidemicState",
    "GeoPoint",
    "LocationSample",
    "MobilityMatrix",
    "NotFoundError",
    "ParseError",
    "ProximityConfig",
    "RawLocationRecord",
    "ScoreParams",
    "ScreeningPlan",
    "SiteCell",
    "SiteGrid",
    "Trajectory",
    "TrajectoryStore",
    "accuracy_band",
    "build_candidate_grid",
    "build_mobility_matrix",
    "derivatives",
    "detect_collisions",
    "direct_contact_score",
    "equirect_km",
    "filter_by_accuracy",
    "haversine_km",
    "indirect_contact_score",
    "mu_sweep",
    "normalize",
    "pairwise_distance_series",
    "parse_activity_segments",
    "parse_location_records",
    "screening_order",
    "simulate",
    "trace_levels",
    "within_threshold_m",
]
