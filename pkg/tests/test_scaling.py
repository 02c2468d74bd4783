from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vfo_adr_sim.control.scaling import RateLimiter, VelocityLimits, scale_commanded_velocities
from vfo_adr_sim.errors import ConfigValidationError


def test_magnitude_scaling_keeps_direction():
    out = scale_commanded_velocities([16.0, 4.0, -8.0], None, 0.1, VelocityLimits(magnitude=8.0))
    assert_allclose(out, [8.0, 2.0, -4.0])


def test_commands_within_limits_pass_unchanged():
    cmd = np.array([0.5, -0.2, 0.1])
    assert_allclose(scale_commanded_velocities(cmd, cmd, 0.1, VelocityLimits()), cmd)


def test_rate_limit_per_component():
    out = scale_commanded_velocities([1.0, -1.0, 0.1], np.zeros(3), 0.1, VelocityLimits(rate=2.0))
    assert_allclose(out, [0.2, -0.2, 0.1])


def test_disabled_limits_pass_through():
    cmd = np.array([100.0, -50.0, 3.0])
    assert_allclose(scale_commanded_velocities(cmd, np.zeros(3), 1e-3, VelocityLimits(enabled=False)), cmd)


def test_rate_limiter_tracks_last_output():
    limiter = RateLimiter(VelocityLimits(rate=1.0), 2)
    first = limiter(np.array([1.0, -1.0]), 0.25)
    second = limiter(np.array([1.0, -1.0]), 0.25)
    assert_allclose(first, [0.25, -0.25])
    assert_allclose(second, [0.5, -0.5])
    limiter.reset([0.9, -0.9])
    assert_allclose(limiter(np.array([1.0, -1.0]), 0.25), [1.0, -1.0])


@pytest.mark.parametrize("kwargs", [{"magnitude": 0.0}, {"rate": -1.0}, {"until": 0.0}])
def test_invalid_limits(kwargs):
    with pytest.raises(ConfigValidationError):
        VelocityLimits(**kwargs)


def test_non_positive_dt_rejected():
    with pytest.raises(ConfigValidationError):
        scale_commanded_velocities([1.0], [0.0], 0.0, VelocityLimits())


def test_limits_active_only_before_until():
    limits = VelocityLimits(until=10.0)
    assert limits.active(0.0)
    assert limits.active(9.999)
    assert not limits.active(10.0)
    assert limits.active(None)
    assert not VelocityLimits(enabled=False).active(0.0)
    assert VelocityLimits().active(1e6)


def test_rate_limiter_passes_through_after_window():
    limiter = RateLimiter(VelocityLimits(magnitude=8.0, rate=1.0, until=0.5), 2)
    assert_allclose(limiter(np.array([20.0, -1.0]), 0.25, t=0.0), [0.25, -0.25])
    assert_allclose(limiter(np.array([20.0, -1.0]), 0.25, t=0.5), [20.0, -1.0])
    assert_allclose(limiter.last, [20.0, -1.0])
