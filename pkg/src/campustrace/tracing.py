"""Level-1/2/3 contact classification through time-respecting chains.

A user is a level-k contact when k is the smallest number of hops in a
chain index -> u1 -> ... -> uk of contact events with strictly
increasing start times (the index case anchors the chain at time minus
infinity). The computation is an earliest-arrival dynamic program per
hop count: arrival[k][u] is the earliest event start reaching u over
chains of exactly k hops, which makes the result identical to exhaustive
enumeration of time-increasing paths. Simultaneous events never chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

from .errors import NotFoundError
from .proximity import ContactEvent
from .timeutil import to_ms

MAX_LEVEL_DEFAULT = 3


@dataclass(frozen=True)
class ContactLevelRecord:
    user_id: str
    level: int
    via_user: str
    first_contact_time: datetime
    event_ref: str


@dataclass(frozen=True)
class ScreeningPlan:
    """Screening priority: level 1 first, earliest first contact first."""

    records: tuple[ContactLevelRecord, ...]
    level_counts: dict[int, int]


@dataclass(frozen=True)
class _Arrival:
    t_ms: int
    via: str
    event: ContactEvent


def trace_levels(
    index_user: str,
    events: Sequence[ContactEvent],
    max_level: int = MAX_LEVEL_DEFAULT,
    known_users: Iterable[str] | None = None,
) -> list[ContactLevelRecord]:
    """Minimum contact level per user, with chain provenance.

    ``known_users`` guards the index lookup (defaults to the users seen
    in the events). Output is sorted by (level, first contact, user id);
    the index case itself is excluded.
    """
    event_users = {u for e in events for u in (e.user_a, e.user_b)}
    universe = set(known_users) if known_users is not None else event_users
    if index_user not in universe:
        raise NotFoundError(f"unknown index_user: {index_user!r}")

    ordered = sorted(events, key=lambda e: (to_ms(e.t_start), e.user_a, e.user_b))
    # arrival[k][u]: earliest chain of exactly k hops reaching u
    arrival: list[dict[str, _Arrival]] = [dict() for _ in range(max_level + 1)]
    arrival[0][index_user] = _Arrival(t_ms=-(2**62), via="", event=None)  # type: ignore[arg-type]

    for k in range(1, max_level + 1):
        prev = arrival[k - 1]
        this = arrival[k]
        for e in ordered:
            t = to_ms(e.t_start)
            for src, dst in ((e.user_a, e.user_b), (e.user_b, e.user_a)):
                if dst == index_user:
                    continue
                hop = prev.get(src)
                if hop is None or t <= hop.t_ms:
                    continue
                if dst not in this:  # ordered scan: first hit is the earliest
                    this[dst] = _Arrival(t_ms=t, via=src, event=e)

    records = []
    seen: set[str] = set()
    for k in range(1, max_level + 1):
        for user, a in arrival[k].items():
            if user in seen:
                continue
            seen.add(user)
            records.append(
                ContactLevelRecord(
                    user_id=user,
                    level=k,
                    via_user=a.via,
                    first_contact_time=a.event.t_start,
                    event_ref=a.event.event_id,
                )
            )
    records.sort(key=lambda r: (r.level, to_ms(r.first_contact_time), r.user_id))
    return records


def screening_order(records: Iterable[ContactLevelRecord]) -> ScreeningPlan:
    """Group by ascending level, then first contact time, then user id."""
    ordered = sorted(records, key=lambda r: (r.level, to_ms(r.first_contact_time), r.user_id))
    counts: dict[int, int] = {}
    for r in ordered:
        counts[r.level] = counts.get(r.level, 0) + 1
    return ScreeningPlan(records=tuple(ordered), level_counts=counts)
