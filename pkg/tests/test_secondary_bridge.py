"""Server-side checks over artifacts emitted by the browser client's test
suite (frontend/test-output/): the uploaded record must pass the same ingest
validation agent records do, and the recorded network traffic must not leak
hold coordinates outside the revealed spotlight discs.

Run `npm test` under frontend/ first; these skip when the artifacts are
absent.
"""

from __future__ import annotations

import json
import math
import os

import pytest

from prospect.records import ingest_log
from tests.conftest import fixture_map

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "frontend", "test-output")
RECORD_PATH = os.path.join(OUT_DIR, "uploaded_record.json")
TRAFFIC_PATH = os.path.join(OUT_DIR, "traffic.json")

needs_artifacts = pytest.mark.skipif(
    not (os.path.exists(RECORD_PATH) and os.path.exists(TRAFFIC_PATH)),
    reason="frontend test artifacts not present; run `npm test` in frontend/",
)


@needs_artifacts
def test_uploaded_record_passes_ingest_validation():
    with open(RECORD_PATH, "rb") as fh:
        record, anomalies = ingest_log(fh.read())
    assert record.actor == "HUMAN"
    assert record.outcome in ("SUCCESS", "TIMEOUT")
    assert 1760 <= len(record.attention) <= 1840
    assert record.duration <= 60.0 + 1e-6
    # the client's fixed-rate sampler should not produce gap anomalies
    assert anomalies == []
    print(f"[PASS] client telemetry ({len(record.attention)} samples, ingest clean)")


@needs_artifacts
def test_traffic_contains_no_unrevealed_hold_coordinates():
    with open(TRAFFIC_PATH, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    spec = fixture_map(doc["map_id"])
    fovea = doc["fovea_radius"]
    assert fovea == spec.fovea_radius
    positions = {h.id: h.position for h in spec.holds}
    saw_reveal = 0
    for entry in doc["traffic"]:
        if entry["path"].endswith("/reveal"):
            req = entry["body"]
            for hold in entry["response"]["holds"]:
                saw_reveal += 1
                # geometry oracle against the true map
                x, y = positions[hold["id"]]
                assert hold["position"] == [x, y]
                assert math.hypot(x - req["x"], y - req["y"]) <= fovea + 1e-9
        else:
            response = entry["response"]
            if isinstance(response, dict):
                assert "holds" not in response, f"non-reveal response leaks holds: {entry['path']}"
    assert saw_reveal > 0
    print(f"[PASS] hidden-landscape enforcement ({saw_reveal} revealed holds all inside their discs)")
