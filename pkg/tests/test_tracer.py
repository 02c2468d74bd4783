from __future__ import annotations

import pytest

from vfo_adr_sim.app_logging import Tracer


def test_stages_recorded_in_order():
    tracer = Tracer("scenario_a", "kp-2")
    with tracer.stage("simulate") as out:
        out["samples"] = 11
    with tracer.stage("export"):
        pass

    dumped = tracer.to_dict()
    assert dumped["scenario_id"] == "scenario_a"
    assert dumped["run_id"] == "kp-2"
    assert [s["name"] for s in dumped["stages"]] == ["simulate", "export"]
    assert dumped["stages"][0]["output"] == {"samples": 11}
    assert "output" not in dumped["stages"][1]
    assert all(s["status"] == "success" and s["duration_ms"] >= 0.0 for s in dumped["stages"])


def test_failed_stage_propagates():
    tracer = Tracer("scenario_a")
    with pytest.raises(RuntimeError):
        with tracer.stage("metrics"):
            raise RuntimeError("boom")
    (stage,) = tracer.to_dict()["stages"]
    assert stage["status"] == "failed"
    assert stage["error"] == "boom"
