from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import eigvals

from vfo_adr_sim.control.adr import (
    AdrController,
    AdrGains,
    EsoBank,
    commanded_configuration_rate,
    control_force,
    eso_derivative,
    eso_derivative_from_input,
    eso_input,
    eso_matrices,
    eso_outputs,
)
from vfo_adr_sim.dynamics.rigid_body import jacobian
from vfo_adr_sim.errors import ConfigValidationError
from vfo_adr_sim.simulation.integrator import rk4_step

SCENARIO_K = [2.4172, 2.4172, 2.4172, 0.5, 0.5, 0.5]
SCENARIO_B_HAT = [0.3, 0.3, 0.3, 2.5, 0.75, 0.75]


@pytest.mark.parametrize("omega", [10.0, 50.0, 200.0])
def test_observer_poles_at_minus_omega(omega):
    a, _, c, l = eso_matrices(omega)
    closed = a - np.outer(l, c)
    # 三重根：比较特征多项式系数 (s + ω)³
    assert_allclose(np.poly(closed), [1.0, 3.0 * omega, 3.0 * omega**2, omega**3], rtol=1e-6)
    assert np.all(eigvals(closed).real < 0.0)
    assert_allclose(eigvals(closed).real.mean(), -omega, rtol=1e-6)


def test_initial_bank_state():
    eta0 = [0.0, -math.pi / 3, math.pi / 4, 1.0, 0.6, 0.6]
    bank = EsoBank.initial(eta0, 200.0)
    assert_allclose(bank.estimates[:, 0], -np.asarray(eta0))
    assert_allclose(bank.estimates[:, 1:], 0.0)
    assert_allclose(bank.gains[0], [600.0, 120000.0, 8.0e6])
    eps_hat, d_hat = eso_outputs(bank)
    assert_allclose(eps_hat, 0.0)
    assert_allclose(d_hat, 0.0)


def test_bank_round_trips_flat_state(rng):
    bank = EsoBank.initial(np.zeros(6), [10, 20, 30, 40, 50, 60])
    flat = rng.normal(size=18)
    bank.load(flat)
    assert_allclose(bank.flat, flat)
    assert_allclose(bank.estimates[2], flat[6:9])


def test_bank_rejects_non_positive_bandwidth():
    with pytest.raises(ConfigValidationError):
        EsoBank.initial(np.zeros(6), [200, 200, 0, 200, 200, 200])


def test_observer_recovers_constant_disturbance():
    """x₁ = t²/2、ε = t、d = 1、u = 0 时估计收敛到真值"""
    bank = EsoBank.initial(np.zeros(6), 20.0)
    gains = bank.gains
    zero = np.zeros(6)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        return eso_derivative_from_input(x, gains, np.full(6, 0.5 * t * t), zero, zero)[0]

    x = bank.flat
    dt = 1e-3
    for k in range(2000):
        x = rk4_step(f, k * dt, x, dt)
    est = x.reshape(6, 3)
    assert_allclose(est[:, 0], 2.0, atol=1e-6)
    assert_allclose(est[:, 1], 2.0, atol=1e-5)
    assert_allclose(est[:, 2], 1.0, atol=1e-5)


def test_eso_derivative_uses_transformed_input(rng):
    bank = EsoBank.initial(rng.normal(size=6) * 0.1, 50.0)
    bank.load(rng.normal(size=18))
    eta = np.array([0.1, 0.2, 0.3, 0.2, -0.3, 1.0])
    eta_c = eta + rng.normal(size=6) * 0.01
    tau_eta = rng.normal(size=6)
    gamma = np.diag([1.0, 0, 0, 1, 1, 1])
    b_hat = np.diag(SCENARIO_B_HAT)
    xdot, eps_dot = eso_derivative(bank, eta_c, eta, tau_eta, eta[3:], b_hat, gamma)
    u = eso_input(tau_eta, eta[3:], b_hat, gamma)
    expected, _ = eso_derivative_from_input(bank.estimates, bank.gains, eta_c, eta, u)
    assert_allclose(xdot, expected)
    assert_allclose(eps_dot, xdot.reshape(6, 3)[:, 1])


def test_control_force_cancels_estimated_disturbance(rng):
    """Γ = I 时 J B̂ Γ Jᵀ τ_η = d̂ + J K J⁻¹ ε̂"""
    gains = AdrGains(K=SCENARIO_K, B_hat=SCENARIO_B_HAT)
    for _ in range(10):
        attitude = np.array([rng.uniform(-1, 1), rng.uniform(-1.2, 1.2), rng.uniform(-3, 3)])
        eps_hat, d_hat = rng.normal(size=6), rng.normal(size=6)
        tau, tau_eta = control_force(eps_hat, d_hat, attitude, gains)
        j_mat = jacobian(attitude)
        assert_allclose(j_mat.T @ tau_eta, tau, atol=1e-12)
        applied = eso_input(tau_eta, attitude, gains.B_hat, np.eye(6))
        assert_allclose(applied, d_hat + j_mat @ gains.K @ np.linalg.inv(j_mat) @ eps_hat, atol=1e-10)


def test_commanded_configuration_rate():
    attitude = np.array([0.1, 0.2, 0.3])
    nu_c = np.array([1.0, 0.0, 0.0, 0.1, 0.2, 0.3])
    assert_allclose(commanded_configuration_rate(np.zeros(6), nu_c, attitude), jacobian(attitude) @ nu_c)


def test_controller_inhibits_early_control():
    gains = AdrGains(K=SCENARIO_K, B_hat=SCENARIO_B_HAT)
    bank = EsoBank.initial(np.zeros(6), 200.0)
    bank.load(np.tile([0.0, 0.1, 1.0], 6))
    adr = AdrController(gains, bank, np.diag([1.0, 0, 0, 1, 1, 1]), inhibition_window_s=1.0)
    eta = np.array([0, 0, 0, 0.1, 0.2, 0.3])
    tau, tau_eta = adr.control(0.999, eta)
    assert_allclose(tau, 0.0)
    assert_allclose(tau_eta, 0.0)
    tau, _ = adr.control(1.0, eta)
    assert np.linalg.norm(tau) > 0.0


def test_zero_gain_allowed_but_not_negative():
    assert_allclose(AdrGains(K=0.0, B_hat=1.0).K, 0.0)
    with pytest.raises(ConfigValidationError):
        AdrGains(K=[-1, 0, 0, 0, 0, 0], B_hat=SCENARIO_B_HAT)
    with pytest.raises(ConfigValidationError):
        AdrGains(K=SCENARIO_K, B_hat=[0.3, 0.3, 0.0, 2.5, 0.75, 0.75])


def test_negative_inhibition_window_rejected():
    with pytest.raises(ConfigValidationError):
        AdrController(AdrGains(K=SCENARIO_K, B_hat=SCENARIO_B_HAT), EsoBank.initial(np.zeros(6), 10.0), np.eye(6), inhibition_window_s=-1.0)


def _run_observer(omega: float, truth_x1, horizon: float, dt: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """u = 0 时用 η_c − η = truth_x1(t) 驱动观测器，返回 (t, d̂) 采样"""
    bank = EsoBank.initial(np.zeros(6), omega)
    gains = bank.gains
    zero = np.zeros(6)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        return eso_derivative_from_input(x, gains, np.full(6, truth_x1(t)), zero, zero)[0]

    n = int(round(horizon / dt))
    x = bank.flat
    times = np.empty(n + 1)
    d_hat = np.empty(n + 1)
    for k in range(n + 1):
        times[k] = k * dt
        d_hat[k] = x[2]
        if k < n:
            x = rk4_step(f, k * dt, x, dt)
    return times, d_hat


def _disturbance_error_gain(omega: float, w: float = 1.0) -> float:
    """|E(jw)/D(jw)| = |s(s² + 3ωs + 3ω²)/(s + ω)³|，s = jw"""
    s = 1j * w
    return abs(s * (s * s + 3.0 * omega * s + 3.0 * omega**2) / (s + omega) ** 3)


def test_observer_settles_constant_disturbance_within_one_second():
    times, d_hat = _run_observer(50.0, lambda t: 0.5 * t * t, horizon=1.0)
    assert times[-1] == pytest.approx(1.0)
    assert abs(d_hat[-1] - 1.0) < 1e-3


@pytest.mark.parametrize("omega", [50.0, 100.0])
def test_observer_sinusoid_error_matches_frequency_response(omega):
    """d = sin t：x₁ = t − sin t、ε = 1 − cos t，稳态误差幅值由误差传递函数给出"""
    times, d_hat = _run_observer(omega, lambda t: t - math.sin(t), horizon=20.0)
    steady = times >= 10.0
    peak = float(np.max(np.abs(d_hat[steady] - np.sin(times[steady]))))
    assert peak == pytest.approx(_disturbance_error_gain(omega), rel=0.05)


def test_doubling_bandwidth_halves_sinusoid_error():
    peaks = []
    for omega in (50.0, 100.0):
        times, d_hat = _run_observer(omega, lambda t: t - math.sin(t), horizon=20.0)
        steady = times >= 10.0
        peaks.append(float(np.max(np.abs(d_hat[steady] - np.sin(times[steady])))))
    assert _disturbance_error_gain(50.0) == pytest.approx(0.05997, abs=1e-4)
    assert _disturbance_error_gain(100.0) == pytest.approx(0.029996, abs=1e-5)
    assert peaks[0] / peaks[1] == pytest.approx(2.0, rel=0.05)
