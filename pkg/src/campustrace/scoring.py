"""Direct and indirect contact scores from per-site, per-day mobility counts.

The mobility matrix tabulates, over an incubation horizon of D days, how
many grid ticks the subject spent at each site cell and how many ticks
each other user spent in collision range of the subject there. The score
is, summed over sites and days, the product of the subject's visit count
and the total neighbor contact ticks, scaled by the interaction area and
divided by the (clamped) mean contact distance:

    score = [sum_d sum_p visits(p,d) * sum_n ticks(n,p,d)] * A / max(D_mean, d_min)

The direct score applies to a confirmed case; the indirect score is the
same functional form applied to a suspected (level-1) contact's matrix.
Scores are dimensionless rankings, not calibrated probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import NotFoundError
from .proximity import ContactEvent
from .store import ResampledTrack, SiteGrid

SUBJECT_KINDS = ("confirmed", "suspected")


@dataclass(frozen=True)
class ScoreParams:
    incubation_days: int = 15
    area_m2: float = math.pi  # interaction disc of the default 1 m radius
    d_min_m: float = 0.5

    def __post_init__(self):
        if self.incubation_days < 1:
            raise ValueError(f"incubation_days must be >= 1, got {self.incubation_days}")
        if self.area_m2 <= 0:
            raise ValueError(f"area_m2 must be positive, got {self.area_m2}")
        if self.d_min_m <= 0:
            raise ValueError(f"d_min_m must be positive, got {self.d_min_m}")


@dataclass
class MobilityMatrix:
    """Per-site, per-day visit and contact-tick counts for one subject."""

    subject: str
    subject_kind: str
    incubation_days: int
    subject_visits: dict[tuple[tuple[int, int], int], int] = field(default_factory=dict)
    contact_ticks: dict[tuple[str, tuple[int, int], int], int] = field(default_factory=dict)
    dist_weighted_sum: float = 0.0
    dist_tick_count: int = 0

    @property
    def mean_distance_m(self) -> float:
        if self.dist_tick_count == 0:
            return 0.0
        return self.dist_weighted_sum / self.dist_tick_count


@dataclass(frozen=True)
class ContactScore:
    value: float
    numerator_sum: float
    area_m2: float
    mean_distance_m: float
    kind: str


def build_mobility_matrix(
    subject: str,
    events: Iterable[ContactEvent],
    tracks: Mapping[str, ResampledTrack],
    site_grid: SiteGrid,
    params: ScoreParams,
    subject_kind: str = "confirmed",
) -> MobilityMatrix:
    """Tabulate the subject's visits and neighbors' contact ticks by (site, day).

    Day 1 starts at the track grid start; ticks beyond day
    ``params.incubation_days`` are excluded. Contact ticks are attributed
    to the event's site cell; every contact tick carries the event's mean
    distance into the tick-weighted mean.
    """
    if subject not in tracks:
        raise NotFoundError(f"subject {subject!r} has no track")
    if subject_kind not in SUBJECT_KINDS:
        raise ValueError(f"subject_kind must be one of {SUBJECT_KINDS}, got {subject_kind!r}")
    track = tracks[subject]
    matrix = MobilityMatrix(subject=subject, subject_kind=subject_kind, incubation_days=params.incubation_days)

    ticks_per_day = 86400 / track.step_s
    max_tick = params.incubation_days * ticks_per_day  # ticks at index >= this are past day D

    present = np.flatnonzero(track.present())
    rows, cols = site_grid.cells_of(track.lat[present], track.lon[present])
    for tick, row, col in zip(present.tolist(), rows.tolist(), cols.tolist()):
        if tick >= max_tick:
            continue
        day = int(tick // ticks_per_day) + 1
        key = ((row, col), day)
        matrix.subject_visits[key] = matrix.subject_visits.get(key, 0) + 1

    for event in events:
        if subject == event.user_a:
            partner = event.user_b
        elif subject == event.user_b:
            partner = event.user_a
        else:
            continue
        cell = site_grid.cell_of(event.midpoint.lat_deg, event.midpoint.lon_deg)
        for tick in range(event.tick_start, event.tick_end + 1):
            if tick >= max_tick:
                continue
            day = int(tick // ticks_per_day) + 1
            key = (partner, cell, day)
            matrix.contact_ticks[key] = matrix.contact_ticks.get(key, 0) + 1
            matrix.dist_weighted_sum += event.mean_distance_m
            matrix.dist_tick_count += 1
    return matrix


def _score(matrix: MobilityMatrix, params: ScoreParams, kind: str) -> ContactScore:
    per_site_day: dict[tuple[tuple[int, int], int], int] = {}
    for (_, cell, day), ticks in matrix.contact_ticks.items():
        per_site_day[(cell, day)] = per_site_day.get((cell, day), 0) + ticks
    numerator = 0.0
    for (cell, day), neighbor_ticks in per_site_day.items():
        numerator += matrix.subject_visits.get((cell, day), 0) * neighbor_ticks
    denom = max(matrix.mean_distance_m, params.d_min_m)
    return ContactScore(
        value=numerator * params.area_m2 / denom,
        numerator_sum=numerator,
        area_m2=params.area_m2,
        mean_distance_m=matrix.mean_distance_m,
        kind=kind,
    )


def direct_contact_score(matrix: MobilityMatrix, params: ScoreParams) -> ContactScore:
    """Contact score of a confirmed case (zero when the matrix is empty)."""
    return _score(matrix, params, kind="direct")


def indirect_contact_score(matrix: MobilityMatrix, params: ScoreParams) -> ContactScore:
    """Same functional form for a suspected (level-1) contact's own matrix."""
    if matrix.subject_kind != "suspected":
        raise ValueError(
            f"indirect score requires a matrix built for a suspected subject, got {matrix.subject_kind!r}"
        )
    return _score(matrix, params, kind="indirect")
