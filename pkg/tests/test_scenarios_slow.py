"""
整段 100 s 场景复现与参数扫描趋势，单个用例需要数分钟：pytest -m slow
"""

from __future__ import annotations

import numpy as np
import pytest

from vfo_adr_sim.cli.sweeps import build_sweep_jobs, run_sweep
from vfo_adr_sim.dynamics.plant import ELLIPSOID_INERTIA
from vfo_adr_sim.simulation.metrics import Metrics, compute_metrics
from vfo_adr_sim.simulation.runner import funnel_initial_conditions, run_scenario
from vfo_adr_sim.simulation.schemas import ScenarioConfig, with_overrides
from vfo_adr_sim.simulation.trace import SimulationTrace

pytestmark = pytest.mark.slow

SWEEP_WORKERS = 4


# 单次 100 s 场景的墙钟上限
WALL_TIME_LIMIT_S = 60.0


def _run(config: ScenarioConfig) -> SimulationTrace:
    trace = run_scenario(config)
    assert trace.completed, trace.fault
    return trace


@pytest.fixture(scope="module")
def trace_a(scenario_a) -> SimulationTrace:
    return _run(scenario_a)


@pytest.fixture(scope="module")
def trace_b(scenario_b) -> SimulationTrace:
    return _run(scenario_b)


@pytest.fixture(scope="module")
def metrics_a(scenario_a, trace_a) -> Metrics:
    return compute_metrics(trace_a, scenario_a.metric_window_s)


@pytest.fixture(scope="module")
def metrics_b(scenario_b, trace_b) -> Metrics:
    return compute_metrics(trace_b, scenario_b.metric_window_s)


def test_full_horizon_runs_within_wall_time(trace_a, trace_b):
    for trace in (trace_a, trace_b):
        assert len(trace) == 100_001
        assert trace.meta["wall_time_s"] < WALL_TIME_LIMIT_S, trace.meta["wall_time_s"]


def test_scenario_a_steady_errors(metrics_a):
    assert metrics_a.sup_e_p <= 0.03
    assert metrics_a.sup_e_2pi <= 0.80


def test_scenario_b_steady_errors(metrics_b):
    assert metrics_b.sup_e_p <= 0.07
    assert metrics_b.sup_e_2pi <= 1.2


def test_scenario_a_transient_caps(metrics_a):
    assert metrics_a.max_commanded_velocity < 2 * 43.41
    assert metrics_a.max_applied_force < 2 * 3281.0
    assert metrics_a.max_d_hat_norm < 2 * 1.5e5
    assert metrics_a.max_abs_theta < 0.5 * np.pi - 1e-3


def test_yaw_discrepancy_bound_holds(metrics_a, metrics_b):
    assert metrics_a.yaw_bound_violations == 0
    assert metrics_b.yaw_bound_violations == 0


def test_delta_sweep_ordering(scenario_a, tmp_path):
    jobs = build_sweep_jobs(scenario_a, "delta")
    manifests = run_sweep(jobs, tmp_path, max_workers=SWEEP_WORKERS)
    assert all(m.completed for m in manifests)
    avg_e_p = [m.metrics.avg_e_p for m in manifests]
    avg_gamma_tau = [m.metrics.avg_gamma_tau for m in manifests]
    assert all(a > b for a, b in zip(avg_e_p, avg_e_p[1:])), avg_e_p
    assert 3.0 <= avg_e_p[0] / avg_e_p[-1] <= 6.5
    assert all(a > b for a, b in zip(avg_gamma_tau, avg_gamma_tau[1:])), avg_gamma_tau


def test_kp_sweep_trend(scenario_a, tmp_path):
    jobs = build_sweep_jobs(scenario_a, "kp", values="1,2,4")
    manifests = run_sweep(jobs, tmp_path, max_workers=SWEEP_WORKERS)
    avg_e_p = [m.metrics.avg_e_p for m in manifests]
    assert all(a > b for a, b in zip(avg_e_p, avg_e_p[1:])), avg_e_p


def test_funnel_from_random_initial_positions(scenario_a):
    base = with_overrides(scenario_a, {"horizon_s": 30.0, "metric_window_s": [20.0, 30.0]})
    rng = np.random.default_rng(0)
    positions = funnel_initial_conditions(base.build_path(), 20, 0.5, rng)
    attitude = list(base.initial.eta0_si[3:])
    for p in positions:
        config = with_overrides(base, {"initial.eta0_si": [float(v) for v in p] + attitude})
        trace = run_scenario(config)
        assert trace.completed, trace.fault
        e_p = trace.e_p_norm()
        assert e_p[-1] < 0.1 * e_p[0]
        assert np.max(np.abs(trace["eta"][:, 4])) < 0.5 * np.pi - 1e-3


def test_velocity_error_shrinks_with_observer_bandwidth(scenario_a):
    # 全驱动、B̂ 与对角化后的 M⁻¹ 一致，外扰为正弦
    inertia = np.diag(np.diag(ELLIPSOID_INERTIA))
    base = with_overrides(
        scenario_a,
        {
            "horizon_s": 20.0,
            "metric_window_s": [10.0, 20.0],
            "plant.inertia_si": inertia.tolist(),
            "plant.actuated": [1, 1, 1, 1, 1, 1],
            "adr.b_hat_diag": (1.0 / np.diag(inertia)).tolist(),
            "disturbance.kind": "sinusoidal",
            "disturbance.amplitudes_si": [1.0, 1.0, 1.0, 0.5, 0.5, 0.5],
            "disturbance.frequencies_rad_per_s": [1.0] * 6,
        },
    )
    bounds = []
    for omega in (50.0, 100.0, 200.0):
        config = with_overrides(base, {"adr.omega_o_rad_per_s": omega})
        trace = run_scenario(config)
        assert trace.completed, trace.fault
        window = trace.t >= 10.0
        bounds.append(float(np.max(np.linalg.norm(trace["eps"][window], axis=1))))
    assert bounds[0] > bounds[1] > bounds[2], bounds
