#!/usr/bin/env python3
"""Record real API responses as JSON fixtures for the console's contract tests.

Builds a 2-user dataset with exactly one scripted encounter, runs it
through the actual service (in-process), and saves each payload the
console consumes. Rerun after any API change:

    python3 scripts/record_fixtures.py
"""

import json
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from campustrace.service import create_app
from campustrace.synthdata import EncounterScript, ScriptedEncounter, generate

FIXTURE_DIR = Path(__file__).parent.parent / "tests" / "fixtures"

ANALYSIS_BODY = {
    "start_date": "2022-04-14",
    "start_time": "00:00:00",
    "step_s": 60,
    "collision_distance_m": 1.0,
    "collision_interval_s": 300,
    "index_user": None,
}

SIM_BODY = {
    "params": {"beta": 0.5, "alpha": 0.2, "gamma": 0.1, "model_kind": "SEIR", "population_n": 50},
    "initial": {"s": 0.97, "e": 0.02, "i": 0.01, "r": 0.0},
    "t_end_days": 120.0,
    "output_stride": 20,
    "mu_values": [0.0],
}


def save(name: str, payload) -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    (FIXTURE_DIR / name).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"recorded {name}")


def main() -> None:
    script = EncounterScript(
        seed=2,
        n_users=2,
        start=datetime(2022, 4, 14, tzinfo=timezone.utc),
        days=2,
        encounters=[ScriptedEncounter("U00", "U01", start_offset_s=5 * 3600, duration_s=1200, distance_m=0.5)],
    )
    with tempfile.TemporaryDirectory() as tmp:
        manifest = generate(script, tmp)
        files = [
            ("files", (manifest["files"][u], (Path(tmp) / manifest["files"][u]).read_bytes(), "application/json"))
            for u in manifest["users"]
        ]
        with TestClient(create_app(Path(tmp) / "svc")) as client:
            dataset = client.post("/datasets", files=files).json()
            save("dataset.json", dataset)
            dataset_id = dataset["data"]["dataset_id"]

            run = client.post(f"/datasets/{dataset_id}/analyses", json=ANALYSIS_BODY).json()
            save("analysis_run.json", run)
            run_id = run["data"]["run_id"]

            save("events.json", client.get(f"/analyses/{run_id}/events").json())
            save("levels.json", client.get(f"/analyses/{run_id}/levels", params={"index_user": "U00"}).json())
            save("report.json", client.get(f"/analyses/{run_id}/report", params={"index_user": "U00"}).json())
            save("scores.json", client.get(f"/analyses/{run_id}/scores", params={"index_user": "U00"}).json())
            save(
                "geojson.json",
                client.get(
                    f"/datasets/{dataset_id}/geojson",
                    params={"analysis_id": run_id, "index_user": "U00"},
                ).json(),
            )
            save(
                "common_locations.json",
                client.get(f"/datasets/{dataset_id}/common-locations", params={"min_users": 2}).json(),
            )
            save("simulation_mu0.json", client.post("/simulations", json=SIM_BODY).json())
            save("simulation_mu1.json", client.post("/simulations", json=dict(SIM_BODY, mu_values=[1.0])).json())
            bad = client.post(
                f"/datasets/{dataset_id}/analyses",
                json=dict(ANALYSIS_BODY, collision_interval_s=30, step_s=60),
            )
            save("invalid_config_response.json", {"status_code": bad.status_code, "body": bad.json()})


if __name__ == "__main__":
    main()
