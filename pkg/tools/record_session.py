"""Record a scripted case4gs session against the live service into a JSON
transcript consumed by the frontend test suite. Regenerate after any change
to the service responses."""
from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fastapi.testclient import TestClient

from gridgame.service import create_app

OUT = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"

DO_NOTHING = {
    "action": {
        "line_switches": [0, 0, 0, 0, 0],
        "substation_choices": [None, None, None, None],
    }
}
CURE = {
    "action": {
        "line_switches": [0, 0, 0, 0, 0],
        "substation_choices": [None, [0, 1, 0, 0], None, None],
    }
}


def main() -> None:
    client = TestClient(create_app())
    transcript = {}

    created = client.post(
        "/sessions", json={"case": "case4gs", "chronic": "case4gs-crisis"}
    )
    session = created.json()["session_id"]
    transcript["create"] = created.json()
    transcript["layout"] = client.get(f"/sessions/{session}/layout").json()

    transcript["t0_preview_nothing"] = client.post(
        f"/sessions/{session}/simulate", json=DO_NOTHING
    ).json()
    transcript["t0_commit_nothing"] = client.post(
        f"/sessions/{session}/action", json=DO_NOTHING
    ).json()

    transcript["t1_preview_nothing"] = client.post(
        f"/sessions/{session}/simulate", json=DO_NOTHING
    ).json()
    transcript["t1_preview_cure"] = client.post(
        f"/sessions/{session}/simulate", json=CURE
    ).json()
    transcript["t1_commit_nothing"] = client.post(
        f"/sessions/{session}/action", json=DO_NOTHING
    ).json()

    # a sibling session proves the cure commit matches its preview
    other = client.post(
        "/sessions", json={"case": "case4gs", "chronic": "case4gs-crisis"}
    ).json()["session_id"]
    client.post(f"/sessions/{other}/action", json=DO_NOTHING)
    transcript["t1_cure_preview_other"] = client.post(
        f"/sessions/{other}/simulate", json=CURE
    ).json()
    transcript["t1_cure_commit_other"] = client.post(
        f"/sessions/{other}/action", json=CURE
    ).json()

    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "session-transcript.json"
    path.write_text(json.dumps(transcript, indent=1) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
