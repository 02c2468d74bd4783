from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vfo_adr_sim.dynamics.plant import (
    ELLIPSOID_DAMPING,
    ELLIPSOID_INERTIA,
    SinusoidalDisturbance,
    VehiclePlant,
    coriolis_rigid_body,
    plant_derivative,
)
from vfo_adr_sim.dynamics.rigid_body import jacobian
from vfo_adr_sim.errors import ConfigValidationError, NonFiniteState


def test_rest_is_equilibrium_without_disturbance():
    plant = VehiclePlant.ellipsoid()
    eta_dot, nu_dot = plant_derivative(plant, np.zeros(6), np.zeros(6), np.zeros(6), 0.0)
    assert_allclose(eta_dot, 0.0)
    assert_allclose(nu_dot, 0.0)


def test_unactuated_axes_ignore_commanded_force():
    plant = VehiclePlant.ellipsoid()
    tau = np.array([0.0, 3.0, -2.0, 0.0, 0.0, 0.0])
    _, nu_dot = plant_derivative(plant, np.zeros(6), np.zeros(6), tau, 0.0)
    assert_allclose(nu_dot, 0.0)


def test_surge_force_accelerates_surge():
    plant = VehiclePlant.ellipsoid()
    _, nu_dot = plant_derivative(plant, np.zeros(6), np.zeros(6), [4.137, 0, 0, 0, 0, 0], 0.0)
    assert nu_dot[0] == pytest.approx(1.0)


def test_fully_actuated_variant():
    plant = VehiclePlant.ellipsoid(underactuated=False)
    assert_allclose(np.diag(plant.actuation), np.ones(6))


def test_configuration_rate_is_jacobian_times_velocity(rng):
    plant = VehiclePlant.ellipsoid()
    eta = np.array([0.3, -0.2, 1.0, 0.2, -0.4, 2.0])
    nu = rng.normal(size=6)
    eta_dot, _ = plant_derivative(plant, eta, nu, np.zeros(6), 0.0)
    assert_allclose(eta_dot, jacobian(eta[3:]) @ nu)


def test_coriolis_is_skew_symmetric(rng):
    for _ in range(20):
        nu = rng.normal(size=6)
        c = coriolis_rigid_body(ELLIPSOID_INERTIA, nu)
        assert_allclose(c + c.T, 0.0, atol=1e-12)
        assert float(nu @ c @ nu) == pytest.approx(0.0, abs=1e-12)


def test_kinetic_energy_decays_without_input(rng):
    plant = VehiclePlant.ellipsoid()
    for _ in range(10):
        nu = rng.normal(size=6)
        _, nu_dot = plant_derivative(plant, np.zeros(6), nu, np.zeros(6), 0.0)
        power = float(nu @ ELLIPSOID_INERTIA @ nu_dot)
        assert power == pytest.approx(-float(nu @ ELLIPSOID_DAMPING @ nu), rel=1e-9)
        assert power < 0.0


def test_coriolis_can_be_disabled(rng):
    plant = VehiclePlant.ellipsoid(include_coriolis=False)
    nu = rng.normal(size=6)
    assert_allclose(plant.restoring_and_coriolis(np.zeros(6), nu), ELLIPSOID_DAMPING @ nu)


def test_sinusoidal_disturbance_values():
    dist = SinusoidalDisturbance(amplitudes=(2, 4, 1.4, 0, 0, 0), frequencies=(1, 0.8, 0.6, 0, 0, 0))
    t = 2.5
    assert_allclose(dist(t), [2 * math.sin(t), 4 * math.sin(0.8 * t), 1.4 * math.sin(0.6 * t), 0, 0, 0])


def test_global_disturbance_mapped_to_body_frame():
    dist = SinusoidalDisturbance(amplitudes=(2, 4, 1.4, 0, 0, 0), frequencies=(1, 0.8, 0.6, 0, 0, 0))
    plant = VehiclePlant.ellipsoid(external_disturbance=dist)
    assert_allclose(plant.body_disturbance(np.zeros(6), 1.0), dist(1.0))
    eta = np.array([0, 0, 0, 0.1, -0.3, 1.2])
    assert_allclose(plant.body_disturbance(eta, 1.0), jacobian(eta[3:]).T @ dist(1.0))


def test_sinusoidal_disturbance_needs_six_components():
    with pytest.raises(ConfigValidationError):
        SinusoidalDisturbance(amplitudes=(1, 2), frequencies=(1, 2))


def test_forced_axes_are_actuated():
    plant = VehiclePlant(inertia=ELLIPSOID_INERTIA, linear_damping=ELLIPSOID_DAMPING, actuation=[1, 0, 0, 0, 0, 1])
    assert_allclose(np.diag(plant.actuation), [1, 0, 0, 1, 1, 1])


@pytest.mark.parametrize(
    "kwargs, invariant",
    [
        ({"inertia": ELLIPSOID_INERTIA + np.triu(np.ones((6, 6)), 1)}, "M = Mᵀ"),
        ({"inertia": -np.eye(6)}, "M ≻ 0"),
        ({"linear_damping": [1, 1, 1, 1, 1, -1]}, "Δ_ii > 0"),
        ({"linear_damping": np.ones((6, 6))}, "Δ diagonal"),
        ({"actuation": [1, 0.5, 0, 1, 1, 1]}, "Γ_ii ∈ {0,1}"),
    ],
)
def test_invalid_plant_rejected(kwargs, invariant):
    base = {"inertia": ELLIPSOID_INERTIA, "linear_damping": ELLIPSOID_DAMPING, "actuation": [1, 0, 0, 1, 1, 1]}
    with pytest.raises(ConfigValidationError) as exc:
        VehiclePlant(**{**base, **kwargs})
    assert exc.value.invariant == invariant


def test_non_finite_input_rejected():
    plant = VehiclePlant.ellipsoid()
    with pytest.raises(NonFiniteState):
        plant_derivative(plant, np.zeros(6), np.zeros(6), [float("nan"), 0, 0, 0, 0, 0], 0.0)
