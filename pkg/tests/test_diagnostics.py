from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vfo_adr_sim.control.vfo import AuxiliaryState, VfoGains, auxiliary_orientation, convergence_field_longitudinal
from vfo_adr_sim.dynamics.plant import VehiclePlant, plant_derivative
from vfo_adr_sim.dynamics.rigid_body import jacobian
from vfo_adr_sim.paths import desired_orientation, ellipse_path, evaluate_frame, helix_path, sample_path_points
from vfo_adr_sim.simulation.diagnostics import (
    ground_truth_disturbance,
    path_following_error,
    velocity_error,
    yaw_pitch_discrepancies,
    yaw_pitch_discrepancy_series,
)


def test_path_error_vanishes_on_path_with_desired_attitude():
    path = helix_path(0.1)
    p = sample_path_points(path, 9)[4]
    frame = evaluate_frame(path, p)
    psi_d, theta_d, _ = desired_orientation(path, frame)
    e, e_2pi = path_following_error(np.r_[p, 0.0, theta_d, psi_d], path, frame)
    assert_allclose(e, 0.0, atol=1e-12)
    assert_allclose(e_2pi, 0.0, atol=1e-12)


def test_wrapped_error_removes_full_turns():
    path = helix_path(0.1)
    p = sample_path_points(path, 9)[4]
    frame = evaluate_frame(path, p)
    psi_d, theta_d, _ = desired_orientation(path, frame)
    e, e_2pi = path_following_error(np.r_[p, 0.0, theta_d, psi_d + 4.0 * math.pi + 0.1], path, frame)
    assert e[4] == pytest.approx(-4.0 * math.pi - 0.1)
    assert e_2pi[4] == pytest.approx(-0.1)
    assert -math.pi < e_2pi[4] <= math.pi


def test_velocity_error(rng):
    eta = np.array([0, 0, 0, 0.1, 0.2, 0.3])
    nu, nu_c = rng.normal(size=6), rng.normal(size=6)
    assert_allclose(velocity_error(eta, nu, nu_c), jacobian(eta[3:]) @ (nu_c - nu))


def test_total_disturbance_zero_for_exact_input_gain():
    """M 对角、B̂ = M⁻¹、Γ = I、静止、无外扰 → d = 0"""
    masses = np.array([4.0, 4.0, 4.0, 0.5, 1.5, 1.5])
    plant = VehiclePlant(inertia=np.diag(masses), linear_damping=np.ones(6), actuation=np.ones(6))
    eta = np.array([0.3, 0.2, 0.1, 0.2, -0.4, 1.0])
    tau = np.array([1.0, -2.0, 0.5, 0.1, 0.3, -0.2])
    tau_eta = np.linalg.inv(jacobian(eta[3:])).T @ tau
    _, nu_dot = plant_derivative(plant, eta, np.zeros(6), tau, 0.0)
    d = ground_truth_disturbance(
        eta, np.zeros(6), nu_dot, np.zeros(6), np.zeros(6), tau_eta, plant, np.diag(1.0 / masses)
    )
    assert_allclose(d, 0.0, atol=1e-12)


def test_discrepancies_vanish_on_path():
    path = ellipse_path(0.2)
    gains = VfoGains()
    for p in sample_path_points(path, 12):
        frame = evaluate_frame(path, p)
        h = convergence_field_longitudinal(frame, gains, path.speed, np.zeros(3))
        theta_a, psi_a, _ = auxiliary_orientation(h, path.strategy, AuxiliaryState())
        disc = yaw_pitch_discrepancies(frame, h, theta_a, psi_a, path, gains, np.zeros(3))
        assert disc.eps_psi == pytest.approx(0.0, abs=1e-12)
        assert disc.eps_theta == pytest.approx(0.0, abs=1e-12)
        assert disc.f_eps_psi == pytest.approx(0.0, abs=1e-12)
        assert disc.f_eps_theta == pytest.approx(0.0, abs=1e-12)


def test_yaw_bound_holds_near_path(rng):
    path = helix_path(0.1)
    gains = VfoGains()
    on_path = sample_path_points(path, 200)
    for _ in range(300):
        p = on_path[rng.integers(len(on_path))] + rng.normal(scale=0.2, size=3)
        eps_hat = rng.normal(scale=0.05, size=3)
        eps_true = eps_hat + rng.normal(scale=0.02, size=3)
        frame = evaluate_frame(path, p)
        h = convergence_field_longitudinal(frame, gains, path.speed, eps_hat)
        theta_a, psi_a, _ = auxiliary_orientation(h, path.strategy, AuxiliaryState())
        disc = yaw_pitch_discrepancies(frame, h, theta_a, psi_a, path, gains, eps_hat, eps_true)
        assert disc.yaw_bound_holds
        assert 0.0 <= disc.f_eps_psi <= math.pi


def test_pitch_discrepancy_matches_angle_difference(rng):
    path = helix_path(0.1)
    gains = VfoGains()
    on_path = sample_path_points(path, 50)
    for p0 in on_path[::5]:
        p = p0 + rng.normal(scale=0.01, size=3)
        frame = evaluate_frame(path, p)
        h = convergence_field_longitudinal(frame, gains, path.speed, np.zeros(3))
        theta_a, psi_a, _ = auxiliary_orientation(h, path.strategy, AuxiliaryState())
        _, theta_d, _ = desired_orientation(path, frame)
        disc = yaw_pitch_discrepancies(frame, h, theta_a, psi_a, path, gains, np.zeros(3))
        assert disc.eps_theta == pytest.approx(theta_d - theta_a, abs=1e-10)


def test_yaw_bound_saturates_when_field_points_backwards():
    path = helix_path(0.1)
    gains = VfoGains()
    frame = evaluate_frame(path, sample_path_points(path, 9)[4])
    # ε̂_p 逆着 ϑ⊥：ĥ*_p 的水平分量沿 ϑ̄⊥ 的投影为负
    eps_hat = -2.0 * frame.tangent
    h = convergence_field_longitudinal(frame, gains, path.speed, eps_hat)
    assert float(h[:2] @ frame.planar_tangent) < 0.0
    theta_a, psi_a, _ = auxiliary_orientation(h, path.strategy, AuxiliaryState())
    disc = yaw_pitch_discrepancies(frame, h, theta_a, psi_a, path, gains, eps_hat)
    assert disc.f_eps_psi == math.pi
    assert disc.yaw_bound_holds

    series = yaw_pitch_discrepancy_series(
        frame.tangent[None, :],
        np.concatenate(frame.normals)[None, :],
        np.array([frame.s_values]),
        h[None, :],
        np.array([psi_a]),
        path,
        gains,
        eps_hat[None, :],
        eps_hat[None, :],
    )
    assert series["f_eps_psi"][0] == math.pi
    assert series["eps_psi"][0] == pytest.approx(disc.eps_psi, abs=1e-12)
    assert series["f_eps_theta"][0] == pytest.approx(disc.f_eps_theta, abs=1e-12)
