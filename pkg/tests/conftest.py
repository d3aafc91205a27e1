import json
from pathlib import Path

import matplotlib
import pytest

matplotlib.use("Agg")

from campustrace import synthdata
from campustrace.pipeline import ingest_takeout_file
from campustrace.store import TrajectoryStore

DATA_DIR = Path(__file__).parent / "data"


def build_store(manifest: dict, fixture_dir: Path) -> TrajectoryStore:
    store = TrajectoryStore()
    for uid in manifest["users"]:
        payload = (fixture_dir / manifest["files"][uid]).read_bytes()
        ingest_takeout_file(store, uid, payload)
    return store


def _make_fixture(tmp_path_factory, n_users: int, seed: int):
    script = synthdata.default_script(seed=seed, n_users=n_users, days=14)
    out = tmp_path_factory.mktemp(f"fixture{n_users}")
    manifest = synthdata.generate(script, out)
    return manifest, out


@pytest.fixture(scope="session")
def fixture5(tmp_path_factory):
    manifest, out = _make_fixture(tmp_path_factory, 5, seed=5)
    return manifest, out, build_store(manifest, out)


@pytest.fixture(scope="session")
def fixture20(tmp_path_factory):
    manifest, out = _make_fixture(tmp_path_factory, 20, seed=20)
    return manifest, out, build_store(manifest, out)


@pytest.fixture(scope="session")
def fixture50(tmp_path_factory):
    manifest, out = _make_fixture(tmp_path_factory, 50, seed=50)
    return manifest, out, build_store(manifest, out)


@pytest.fixture()
def segment_fixture_json() -> bytes:
    return (DATA_DIR / "sample_segments.json").read_bytes()


@pytest.fixture()
def segment_golden_csv() -> str:
    return (DATA_DIR / "sample_segments_golden.csv").read_text()
