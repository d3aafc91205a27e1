#!/usr/bin/env python3
"""Start a real campustrace service for the console's live test suite.

Generates a 2-user dataset with one scripted encounter, binds the
service to a free port, prints one JSON line with the port and fixture
file paths, then serves until killed.
"""

import json
import socket
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import uvicorn

from campustrace.service import create_app
from campustrace.synthdata import EncounterScript, ScriptedEncounter, generate


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="campustrace-live-"))
    script = EncounterScript(
        seed=2,
        n_users=2,
        start=datetime(2022, 4, 14, tzinfo=timezone.utc),
        days=2,
        encounters=[ScriptedEncounter("U00", "U01", start_offset_s=5 * 3600, duration_s=1200, distance_m=0.5)],
    )
    manifest = generate(script, workdir / "raw")
    port = free_port()
    files = {u: str(workdir / "raw" / manifest["files"][u]) for u in manifest["users"]}
    print(json.dumps({"port": port, "files": files}), flush=True)
    uvicorn.run(create_app(workdir / "svc"), host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
