import io
import json
import time
from datetime import date
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from campustrace.pipeline import run_analysis
from campustrace.proximity import ProximityConfig
from campustrace.service import create_app


def upload_files(manifest, fixture_dir):
    return [
        ("files", (manifest["files"][uid], (fixture_dir / manifest["files"][uid]).read_bytes(), "application/json"))
        for uid in manifest["users"]
    ]


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "data")
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def client5(client, fixture5):
    manifest, fixture_dir, _ = fixture5
    resp = client.post("/datasets", files=upload_files(manifest, fixture_dir))
    assert resp.status_code == 201
    return client, resp.json()["data"]["dataset_id"], fixture5


ANALYSIS_BODY = {"start_date": "2022-04-14", "collision_distance_m": 1.0, "collision_interval_s": 300}


def wait_done(client, run_id, timeout_s=120.0):
    deadline = time.time() + timeout_s
    while time.time() < deadline:
        status = client.get(f"/analyses/{run_id}").json()["data"]["status"]
        if status in ("done", "failed"):
            return status
        time.sleep(0.2)
    raise TimeoutError("analysis did not finish")


class TestDatasets:
    def test_upload_single_valid_file(self, client, fixture5):
        manifest, fixture_dir, _ = fixture5
        files = upload_files(manifest, fixture_dir)[:1]
        resp = client.post("/datasets", files=files)
        assert resp.status_code == 201
        data = resp.json()["data"]
        assert data["n_users"] == 1
        assert data["users"][0]["user_id"] == "U00"
        assert resp.json()["schema_version"] == 1

    def test_duplicate_file_in_upload_is_idempotent(self, client, fixture5):
        manifest, fixture_dir, _ = fixture5
        files = upload_files(manifest, fixture_dir)[:1]
        resp_once = client.post("/datasets", files=files)
        resp_twice = client.post("/datasets", files=files + files)
        stored_once = resp_once.json()["data"]["users"][0]["stored"]
        assert resp_twice.json()["data"]["n_users"] == 1
        assert resp_twice.json()["data"]["users"][-1]["stored"] == stored_once

    def test_malformed_file_400_with_offset(self, client):
        resp = client.post("/datasets", files=[("files", ("u.json", b'{"locations": [}', "application/json"))])
        assert resp.status_code == 400
        assert "offset" in resp.json()

    def test_upload_size_cap_413(self, tmp_path, fixture5):
        manifest, fixture_dir, _ = fixture5
        app = create_app(tmp_path / "small", max_upload_bytes=10)
        with TestClient(app) as small_client:
            resp = small_client.post("/datasets", files=upload_files(manifest, fixture_dir)[:1])
        assert resp.status_code == 413

    def test_unknown_dataset_404(self, client):
        assert client.get("/datasets/nope").status_code == 404

    def test_bundle_persisted_on_disk(self, tmp_path, fixture5):
        manifest, fixture_dir, _ = fixture5
        data_dir = tmp_path / "persist"
        app = create_app(data_dir)
        with TestClient(app) as c:
            ds = c.post("/datasets", files=upload_files(manifest, fixture_dir)).json()["data"]
        assert (data_dir / "datasets" / ds["dataset_id"] / "metadata.json").exists()


class TestAnalyses:
    def test_small_dataset_runs_synchronously(self, client5):
        client, dataset_id, _ = client5
        resp = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY)
        assert resp.status_code == 201
        assert resp.json()["data"]["status"] == "done"

    def test_events_match_library_run(self, client5):
        client, dataset_id, (manifest, fixture_dir, store) = client5
        run = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()["data"]
        api_events = client.get(f"/analyses/{run['run_id']}/events").json()["data"]["events"]
        lib = run_analysis(store, ProximityConfig(start_date=date(2022, 4, 14)))
        assert len(api_events) == len(lib.events)
        for got, want in zip(api_events, lib.events):
            assert got["user_a"] == want.user_a
            assert got["user_b"] == want.user_b
            assert got["duration_s"] == want.duration_s
            assert got["min_distance_m"] == want.min_distance_m

    def test_invalid_config_422(self, client5):
        client, dataset_id, _ = client5
        bad = dict(ANALYSIS_BODY, collision_interval_s=30, step_s=60)
        resp = client.post(f"/datasets/{dataset_id}/analyses", json=bad)
        assert resp.status_code == 422
        assert "collision_interval_s" in resp.json()["detail"]

    def test_unknown_field_rejected(self, client5):
        client, dataset_id, _ = client5
        resp = client.post(f"/datasets/{dataset_id}/analyses", json=dict(ANALYSIS_BODY, colision_distance=2))
        assert resp.status_code == 422

    def test_repost_same_config_new_run_same_results(self, client5):
        client, dataset_id, _ = client5
        r1 = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()["data"]
        r2 = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()["data"]
        assert r1["run_id"] != r2["run_id"]
        e1 = client.get(f"/analyses/{r1['run_id']}/events").json()["data"]["events"]
        e2 = client.get(f"/analyses/{r2['run_id']}/events").json()["data"]["events"]
        assert e1 == e2

    def test_pagination_stable(self, client5):
        client, dataset_id, _ = client5
        run = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()["data"]
        full = client.get(f"/analyses/{run['run_id']}/events").json()["data"]
        paged = []
        for off in range(0, full["total"], 2):
            page = client.get(f"/analyses/{run['run_id']}/events", params={"offset": off, "limit": 2})
            paged.extend(page.json()["data"]["events"])
        assert paged == full["events"]

    def test_async_path_on_larger_dataset(self, tmp_path, fixture20):
        manifest, fixture_dir, store = fixture20
        app = create_app(tmp_path / "async", sync_threshold_users=10)
        with TestClient(app) as client:
            ds = client.post("/datasets", files=upload_files(manifest, fixture_dir)).json()["data"]
            run = client.post(f"/datasets/{ds['dataset_id']}/analyses", json=ANALYSIS_BODY).json()["data"]
            assert run["status"] in ("pending", "running")
            assert wait_done(client, run["run_id"]) == "done"
            events = client.get(f"/analyses/{run['run_id']}/events").json()["data"]
            lib = run_analysis(store, ProximityConfig(start_date=date(2022, 4, 14)))
            assert events["total"] == len(lib.events)

    def test_results_stable_across_reads(self, client5):
        client, dataset_id, _ = client5
        run = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()["data"]
        first = client.get(f"/analyses/{run['run_id']}/events").json()
        second = client.get(f"/analyses/{run['run_id']}/events").json()
        assert first == second


class TestLevelsScoresReport:
    def _run(self, client, dataset_id, body=None):
        return client.post(f"/datasets/{dataset_id}/analyses", json=body or ANALYSIS_BODY).json()["data"]

    def test_levels_requires_index_user(self, client5):
        client, dataset_id, _ = client5
        run = self._run(client, dataset_id)
        resp = client.get(f"/analyses/{run['run_id']}/levels")
        assert resp.status_code == 422
        ok = client.get(f"/analyses/{run['run_id']}/levels", params={"index_user": "U00"})
        assert ok.status_code == 200

    def test_levels_from_config_index_user(self, client5):
        client, dataset_id, _ = client5
        run = self._run(client, dataset_id, dict(ANALYSIS_BODY, index_user="U00"))
        resp = client.get(f"/analyses/{run['run_id']}/levels")
        assert resp.status_code == 200
        records = resp.json()["data"]["records"]
        assert all(r["level"] == 1 for r in records)  # index-filtered events: level 1 only

    def test_level_chain_on_full_events(self, client5):
        client, dataset_id, (manifest, _, _) = client5
        run = self._run(client, dataset_id)
        data = client.get(f"/analyses/{run['run_id']}/levels", params={"index_user": "U00"}).json()["data"]
        levels = {r["user_id"]: r["level"] for r in data["records"]}
        assert levels["U01"] == 1
        assert levels["U02"] == 2
        assert levels["U03"] == 3

    def test_screening_order_in_payload(self, client5):
        client, dataset_id, _ = client5
        run = self._run(client, dataset_id)
        records = client.get(f"/analyses/{run['run_id']}/levels", params={"index_user": "U00"}).json()["data"][
            "records"
        ]
        levels = [r["level"] for r in records]
        assert levels == sorted(levels)

    def test_scores_payload(self, client5):
        client, dataset_id, _ = client5
        run = self._run(client, dataset_id)
        data = client.get(f"/analyses/{run['run_id']}/scores", params={"index_user": "U00"}).json()["data"]
        kinds = {s["subject"]: s["kind"] for s in data["scores"]}
        assert kinds["U00"] == "direct"
        assert all(k == "indirect" for subject, k in kinds.items() if subject != "U00")
        direct = next(s for s in data["scores"] if s["subject"] == "U00")
        assert direct["value"] > 0

    def test_report_rows(self, client5):
        client, dataset_id, _ = client5
        run = self._run(client, dataset_id)
        rows = client.get(f"/analyses/{run['run_id']}/report", params={"index_user": "U00"}).json()["data"]["rows"]
        assert [r["contact_level"] for r in rows] == sorted(r["contact_level"] for r in rows)
        assert set(rows[0]) == {"user_id", "date", "time", "latitude", "longitude", "visited_location", "contact_level"}

    def test_unknown_run_404(self, client):
        assert client.get("/analyses/nope/events").status_code == 404


class TestGeoJsonEndpoint:
    def test_tracks_only(self, client5):
        client, dataset_id, _ = client5
        doc = client.get(f"/datasets/{dataset_id}/geojson").json()
        kinds = [f["properties"]["kind"] for f in doc["features"]]
        assert kinds.count("track") == 5

    def test_with_events_and_levels(self, client5):
        client, dataset_id, _ = client5
        run = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()["data"]
        doc = client.get(
            f"/datasets/{dataset_id}/geojson",
            params={"analysis_id": run["run_id"], "index_user": "U00"},
        ).json()
        contacts = [f for f in doc["features"] if f["properties"]["kind"] == "contact"]
        assert contacts and all("level" in c["properties"] for c in contacts)


class TestSimulations:
    BODY = {
        "params": {"beta": 0.5, "alpha": 0.2, "gamma": 0.1},
        "initial": {"s": 0.97, "e": 0.02, "i": 0.01, "r": 0.0},
        "t_end_days": 120.0,
        "mu_values": [0.0, 0.5, 1.0],
    }

    def test_flat_series_when_no_seed_infection(self, client):
        body = dict(self.BODY, initial={"s": 1.0, "e": 0.0, "i": 0.0, "r": 0.0}, mu_values=[0.0])
        runs = client.post("/simulations", json=body).json()["data"]["runs"]
        states = runs[0]["states"]
        assert all(st["s"] == 1.0 and st["i"] == 0.0 for st in states)

    def test_peak_non_increasing_in_mu(self, client):
        runs = client.post("/simulations", json=self.BODY).json()["data"]["runs"]
        peaks = [r["summary"]["peak_i"] for r in runs]
        assert peaks[0] > peaks[1] > peaks[2]

    def test_invalid_initial_422(self, client):
        body = dict(self.BODY, initial={"s": 0.9, "e": 0.9, "i": 0.0, "r": 0.0})
        assert client.post("/simulations", json=body).status_code == 422

    def test_mu_one_flat_s(self, client):
        body = dict(self.BODY, mu_values=[1.0])
        runs = client.post("/simulations", json=body).json()["data"]["runs"]
        s_values = {st["s"] for st in runs[0]["states"]}
        assert s_values == {0.97}


class TestConsoleMount:
    def test_console_served_when_configured(self, tmp_path):
        frontend = Path(__file__).parent.parent / "frontend"
        if not (frontend / "public" / "js" / "app.js").exists():
            pytest.skip("frontend not built (npm run build)")
        app = create_app(tmp_path / "data", console_dir=frontend)
        with TestClient(app) as client:
            page = client.get("/console/")
            assert page.status_code == 200
            assert "campustrace console" in page.text
            assert client.get("/console/public/js/app.js").status_code == 200
            assert client.get("/health").status_code == 200

    def test_no_console_by_default(self, client):
        assert client.get("/console/").status_code == 404


class TestCommonLocations:
    def test_shared_cells_have_bounds_and_visitors(self, client5):
        client, dataset_id, (manifest, _, store) = client5
        resp = client.get(f"/datasets/{dataset_id}/common-locations", params={"min_users": 2})
        assert resp.status_code == 200
        cells = resp.json()["data"]["cells"]
        lib_cells = store.common_locations(min_users=2)
        assert [tuple(c["cell"]) for c in cells] == [c.cell_id for c in lib_cells]
        for c in cells:
            lat_min, lon_min, lat_max, lon_max = c["bounds"]
            assert lat_min < lat_max and lon_min < lon_max
            assert len(c["visitors"]) >= 2

    def test_min_users_filter(self, client5):
        client, dataset_id, _ = client5
        all_cells = client.get(f"/datasets/{dataset_id}/common-locations", params={"min_users": 1}).json()
        shared = client.get(f"/datasets/{dataset_id}/common-locations", params={"min_users": 2}).json()
        assert len(all_cells["data"]["cells"]) > len(shared["data"]["cells"])

    def test_unknown_dataset_404(self, client):
        assert client.get("/datasets/zzz/common-locations").status_code == 404
