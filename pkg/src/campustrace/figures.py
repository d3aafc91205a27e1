"""Report figures rendered to files next to the delimited outputs.

Matplotlib with the Agg backend only; nothing here opens a window. Each
function writes one PNG and returns the path.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .epidemic import EpidemicSeries, MuSummary
from .geo import GeoPoint
from .proximity import ContactEvent

_LEVEL_COLORS = {1: "#d62728", 2: "#ff7f0e", 3: "#ffbf00"}


def map_figure(
    tracks: Mapping[str, Sequence[GeoPoint]],
    events: Iterable[ContactEvent],
    out_path: str | Path,
    levels: Mapping[str, int] | None = None,
    title: str = "user tracks and contact events",
) -> Path:
    """Track polylines with contact markers, lon/lat axes."""
    fig, ax = plt.subplots(figsize=(8, 7))
    for user_id in sorted(tracks):
        pts = tracks[user_id]
        if not pts:
            continue
        ax.plot(
            [p.lon_deg for p in pts],
            [p.lat_deg for p in pts],
            lw=0.7,
            alpha=0.7,
            label=user_id if len(tracks) <= 12 else None,
        )
    for e in events:
        level = max(levels.get(e.user_a, 0), levels.get(e.user_b, 0)) if levels else None
        ax.plot(
            e.midpoint.lon_deg,
            e.midpoint.lat_deg,
            marker="x",
            ms=9,
            mew=2,
            color=_LEVEL_COLORS.get(level, "#d62728"),
        )
    ax.set_xlabel("longitude [deg]")
    ax.set_ylabel("latitude [deg]")
    ax.set_title(title)
    ax.ticklabel_format(useOffset=False)
    if len(tracks) <= 12:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path


def epidemic_figure(series: EpidemicSeries, out_path: str | Path) -> Path:
    """s/e/i/r fractions over time for one run."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ts = [st.t for st in series.states]
    for attr, label, color in (
        ("s", "susceptible", "#1f77b4"),
        ("e", "exposed", "#ff7f0e"),
        ("i", "infectious", "#d62728"),
        ("r", "recovered", "#2ca02c"),
    ):
        if attr == "e" and series.params.model_kind == "SIR":
            continue
        ax.plot(ts, [getattr(st, attr) for st in series.states], label=label, color=color)
    p = series.params
    ax.set_xlabel("time [days]")
    ax.set_ylabel("population fraction")
    ax.set_title(
        f"{p.model_kind}  beta={p.beta} alpha={p.alpha} gamma={p.gamma} mu={p.mu}  "
        f"peak i={series.summary.peak_i:.3f} @ {series.summary.peak_time_days:.0f} d"
    )
    ax.legend()
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path


def mu_sweep_figure(summaries: Sequence[MuSummary], out_path: str | Path) -> Path:
    """Peak infectious fraction and final size versus the control mu."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mus = [s.mu for s in summaries]
    ax.plot(mus, [s.peak_i for s in summaries], "o-", label="peak infectious fraction")
    ax.plot(mus, [s.final_r for s in summaries], "s-", label="final recovered fraction")
    ax.set_xlabel("control parameter mu")
    ax.set_ylabel("fraction")
    ax.set_title("effect of mobility restriction")
    ax.legend()
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path
