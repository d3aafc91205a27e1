from datetime import datetime, timedelta, timezone

from campustrace.epidemic import EpidemicParams, EpidemicState, mu_sweep, simulate
from campustrace.figures import epidemic_figure, map_figure, mu_sweep_figure
from campustrace.geo import GeoPoint
from test_exporters import ev

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_map_figure_writes_png(tmp_path):
    tracks = {
        "a": [GeoPoint(3.0, 101.6), GeoPoint(3.001, 101.601)],
        "b": [GeoPoint(3.002, 101.602), GeoPoint(3.003, 101.603)],
    }
    out = map_figure(tracks, [ev("a", "b", 600)], tmp_path / "map.png", levels={"b": 1})
    assert out.read_bytes()[:8] == PNG_MAGIC


def test_epidemic_figure_writes_png(tmp_path):
    series = simulate(
        EpidemicParams(beta=0.5, alpha=0.2, gamma=0.1),
        EpidemicState(0.97, 0.02, 0.01, 0.0),
        60.0,
        output_stride=10,
    )
    out = epidemic_figure(series, tmp_path / "curves.png")
    assert out.read_bytes()[:8] == PNG_MAGIC


def test_mu_sweep_figure_writes_png(tmp_path):
    sweep = mu_sweep(
        EpidemicParams(beta=0.5, alpha=0.2, gamma=0.1),
        EpidemicState(0.97, 0.02, 0.01, 0.0),
        [0.0, 0.5, 1.0],
        t_end_days=60.0,
    )
    out = mu_sweep_figure(sweep, tmp_path / "sweep.png")
    assert out.read_bytes()[:8] == PNG_MAGIC
