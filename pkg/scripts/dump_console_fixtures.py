"""Regenerate the console test fixtures from the live service code.

Usage: python scripts/dump_console_fixtures.py

Boots the dispatch service in-process on the bundled Port Arthur scenario
(all tasks ingested, virtual clock at 14:00) and captures the exact HTTP
responses the console consumes into frontend/fixtures/.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from rescuedispatch.core import parse_hhmm
from rescuedispatch.scenario import load_scenario
from rescuedispatch.service import SimClock, create_app

import importlib.resources as resources

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "fixtures"


def main():
    scenario = load_scenario(
        str(resources.files("rescuedispatch").joinpath("data/portarthur.json")))
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Path(tmp) / "events.jsonl",
                         clock=SimClock(parse_hhmm("14:00")),
                         scenario=scenario, ingest_tasks=True)
        client = TestClient(app)
        OUT.mkdir(parents=True, exist_ok=True)
        fixtures = {
            "portarthur_schedule.json": client.get("/schedule").json(),
            "portarthur_state.json": client.get("/state").json(),
            "portarthur_metrics.json": client.get("/metrics").json(),
            "portarthur_whatif_double.json":
                client.post("/whatif", json={"weights_scale": 2.0}).json(),
            "portarthur_whatif_extra_unit.json":
                client.post("/whatif", json={"extra_units": [
                    {"id": "unit-3", "available_at": parse_hhmm("14:00")},
                    {"id": "unit-4", "available_at": parse_hhmm("14:00")},
                ]}).json(),
        }
        for name, body in fixtures.items():
            (OUT / name).write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
            print(f"wrote frontend/fixtures/{name}")


if __name__ == "__main__":
    main()
