from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from vfo_adr_sim.dynamics.plant import ELLIPSOID_INERTIA, SinusoidalDisturbance
from vfo_adr_sim.errors import ConfigParseError, ConfigValidationError
from vfo_adr_sim.scenarios import list_bundled_scenarios, load_config_text, parse_config
from vfo_adr_sim.simulation.schemas import ScenarioConfig, with_overrides
from vfo_adr_sim.utils import canonical_json, config_hash


def _write(tmp_path: Path, data: dict) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return path


def _bundled_dict(config: ScenarioConfig) -> dict:
    return config.model_dump(mode="json")


def test_bundled_scenarios_listed():
    assert list_bundled_scenarios() == ["scenario_a", "scenario_b"]


def test_scenario_a_matches_reference_parameters(scenario_a):
    assert scenario_a.horizon_s == 100.0
    assert scenario_a.step_s == 1e-3
    assert scenario_a.metric_window_s == (50.0, 100.0)
    assert scenario_a.path.kind == "helix"
    assert scenario_a.path.speed_mps == 0.1
    vfo = scenario_a.vfo
    assert (vfo.k_p, vfo.k_theta, vfo.k_psi, vfo.k_phi, vfo.delta_p, vfo.delta_o) == (2.0, 4.0, 4.0, 5.0, 0.75, 1.0)
    assert scenario_a.adr.gain_k_diag == [2.4172, 2.4172, 2.4172, 0.5, 0.5, 0.5]
    assert scenario_a.adr.b_hat_diag == [0.3, 0.3, 0.3, 2.5, 0.75, 0.75]
    assert scenario_a.adr.omega_o_rad_per_s == 200.0
    assert scenario_a.adr.inhibition_window_s == 1.0
    assert_allclose(scenario_a.initial.eta0_si, [0.0, -math.pi / 3, math.pi / 4, 1.0, 0.6, 0.6])
    plant = scenario_a.build_plant()
    assert_allclose(plant.inertia, ELLIPSOID_INERTIA)
    assert_allclose(np.diag(plant.actuation), [1, 0, 0, 1, 1, 1])
    assert_allclose(plant.external_disturbance(3.0), 0.0)
    assert scenario_a.limits.enabled is False
    assert scenario_a.limits.build().active(0.0) is False


def test_scenario_b_matches_reference_parameters(scenario_b):
    assert scenario_b.path.kind == "ellipse"
    assert scenario_b.path.speed_mps == 0.2
    assert scenario_b.adr.gain_k_diag == [0.5] * 6
    assert_allclose(scenario_b.initial.eta0_si, [0.0, -math.pi / 3, math.pi / 4, -0.1, 0.0, 0.3])
    limits = scenario_b.limits.build()
    assert limits.until == 10.0
    assert limits.active(9.0) and not limits.active(10.0)
    dist = scenario_b.build_plant().external_disturbance
    assert isinstance(dist, SinusoidalDisturbance)
    t = 1.7
    assert_allclose(dist(t), [2 * math.sin(t), 4 * math.sin(0.8 * t), 1.4 * math.sin(0.6 * t), 0, 0, 0])


def test_parse_config_from_file(tmp_path, scenario_a):
    config = parse_config(_write(tmp_path, _bundled_dict(scenario_a)))
    assert config.canonical_dict() == scenario_a.canonical_dict()


def test_pitch_outside_domain_rejected(tmp_path, scenario_a):
    data = _bundled_dict(scenario_a)
    data["initial"]["eta0_si"][4] = 2.0
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(_write(tmp_path, data))
    assert exc.value.key == "initial.eta0_si"
    assert "pitch" in exc.value.invariant


def test_negative_observer_bandwidth_rejected(tmp_path, scenario_a):
    data = _bundled_dict(scenario_a)
    data["adr"]["omega_o_rad_per_s"] = -5.0
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(_write(tmp_path, data))
    assert exc.value.key == "adr.omega_o_rad_per_s"


def test_unknown_key_reports_line(tmp_path, scenario_a):
    data = _bundled_dict(scenario_a)
    data["vfo"]["k_pp"] = 3.0
    path = _write(tmp_path, data)
    with pytest.raises(ConfigParseError) as exc:
        parse_config(path)
    err = exc.value
    assert err.key == "vfo.k_pp"
    lines = path.read_text(encoding="utf-8").splitlines()
    assert '"k_pp"' in lines[err.line - 1]


def test_wrong_type_is_parse_error():
    text = '{\n  "scenario_id": "x",\n  "horizon_s": "long",\n  "path": {"kind": "helix", "speed_mps": 0.1},\n  "initial": {"eta0_si": [0, 0, 0, 0, 0, 0]}\n}'
    with pytest.raises(ConfigParseError) as exc:
        load_config_text(text)
    assert exc.value.key == "horizon_s"
    assert exc.value.line == 3


def test_malformed_json_reports_line():
    with pytest.raises(ConfigParseError) as exc:
        load_config_text('{\n  "scenario_id": "x",\n  "horizon_s": ,\n}', path="broken.json")
    assert exc.value.line == 3
    assert str(exc.value).startswith("broken.json:3")


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigParseError):
        parse_config(tmp_path / "nope.json")


def test_metric_window_must_fit_horizon(scenario_a):
    data = _bundled_dict(scenario_a)
    data["metric_window_s"] = [50.0, 150.0]
    with pytest.raises(ConfigValidationError) as exc:
        load_config_text(json.dumps(data))
    assert "metric window" in exc.value.invariant


def test_invalid_plant_surfaces_at_parse_time(scenario_a):
    data = _bundled_dict(scenario_a)
    data["plant"]["inertia_si"][0][1] = 1.0
    with pytest.raises(ConfigValidationError) as exc:
        load_config_text(json.dumps(data))
    assert exc.value.invariant == "M = Mᵀ"


def test_overrides_revalidate(scenario_a):
    updated = with_overrides(scenario_a, {"vfo.k_p": 4.0, "adr.omega_o_rad_per_s": 100.0})
    assert updated.vfo.k_p == 4.0
    assert updated.adr.omega_o_rad_per_s == 100.0
    assert scenario_a.vfo.k_p == 2.0
    with pytest.raises(ValidationError):
        with_overrides(scenario_a, {"vfo.delta_p": 1.5})


def test_config_hash_is_canonical(scenario_a):
    again = parse_config("scenario_a")
    assert config_hash(again.canonical_dict()) == config_hash(scenario_a.canonical_dict())
    changed = with_overrides(scenario_a, {"vfo.k_p": 2.5})
    assert config_hash(changed.canonical_dict()) != config_hash(scenario_a.canonical_dict())
    assert canonical_json({"b": 1.0, "a": [0.1, 2]}) == '{"a":["0.1",2],"b":"1.0"}'
