"""
真值被控对象：M ν̇ + μ(η, ν) + τ* = Γ τ，其中 τ* = Jᵀ τ*_η(t)。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.dynamics.rigid_body import (
    DEFAULT_SINGULARITY_MARGIN,
    Configuration,
    Pseudovelocity,
    as_vector6,
    jacobian,
)
from vfo_adr_sim.errors import ConfigValidationError
from vfo_adr_sim.utils import ensure_finite, skew

# 椭球形水下航行器参数（SI 单位）
ELLIPSOID_INERTIA = np.array(
    [
        [4.137, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 4.137, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 4.137, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.535, 0.0, -0.390],
        [0.0, 0.0, 0.0, 0.0, 1.653, 0.0],
        [0.0, 0.0, 0.0, -0.390, 0.0, 1.577],
    ]
)
ELLIPSOID_DAMPING = np.diag([2.0, 10.0, 10.0, 10.0, 10.0, 10.0])
ELLIPSOID_UNDERACTUATED_GAMMA = np.diag([1.0, 0.0, 0.0, 1.0, 1.0, 1.0])

# surge / roll / pitch / yaw 必须被驱动
_FORCED_ACTUATED = (0, 3, 4, 5)


class ExternalDisturbance(Protocol):
    def __call__(self, t: float) -> np.ndarray: ...


@dataclass(frozen=True)
class ZeroDisturbance:
    def __call__(self, t: float) -> np.ndarray:
        return np.zeros(6)


@dataclass(frozen=True)
class SinusoidalDisturbance:
    """τ*_η,i(t) = a_i sin(ω_i t + φ_i)，全局系 {G}"""

    amplitudes: tuple[float, ...]
    frequencies: tuple[float, ...]
    phases: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        for name in ("amplitudes", "frequencies", "phases"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != 6:
                raise ConfigValidationError(f"{name} must have 6 entries", invariant="disturbance has 6 components")
            object.__setattr__(self, name, values)

    def __call__(self, t: float) -> np.ndarray:
        return np.array([a * math.sin(w * t + p) for a, w, p in zip(self.amplitudes, self.frequencies, self.phases)])


def coriolis_rigid_body(inertia: np.ndarray, nu: ArrayLike) -> np.ndarray:
    """由惯性矩阵分块构造的刚体科氏/向心矩阵 C_RB(ν)，满足 νᵀ C_RB ν = 0"""
    nu6 = as_vector6(nu)
    m11, m12 = inertia[:3, :3], inertia[:3, 3:]
    m21, m22 = inertia[3:, :3], inertia[3:, 3:]
    a = skew(m11 @ nu6[:3] + m12 @ nu6[3:])
    b = skew(m21 @ nu6[:3] + m22 @ nu6[3:])
    out = np.zeros((6, 6))
    out[:3, 3:] = -a
    out[3:, :3] = -a
    out[3:, 3:] = -b
    return out


def _zero_restoring(eta: np.ndarray) -> np.ndarray:
    return np.zeros(6)


@dataclass(frozen=True)
class VehiclePlant:
    inertia: np.ndarray
    linear_damping: np.ndarray
    actuation: np.ndarray
    include_coriolis: bool = True
    restoring: Callable[[np.ndarray], np.ndarray] = _zero_restoring
    external_disturbance: ExternalDisturbance = field(default_factory=ZeroDisturbance)
    singularity_margin: float = DEFAULT_SINGULARITY_MARGIN

    def __post_init__(self) -> None:
        inertia = np.array(self.inertia, dtype=float).reshape(6, 6)
        damping = np.array(self.linear_damping, dtype=float)
        if damping.ndim == 1:
            damping = np.diag(damping)
        actuation = np.array(self.actuation, dtype=float)
        if actuation.ndim == 1:
            actuation = np.diag(actuation)

        if not np.allclose(inertia, inertia.T, rtol=0.0, atol=1e-12):
            raise ConfigValidationError("inertia matrix is not symmetric", invariant="M = Mᵀ", key="inertia")
        try:
            np.linalg.cholesky(inertia)
        except np.linalg.LinAlgError as e:
            raise ConfigValidationError(
                "inertia matrix is not positive definite", invariant="M ≻ 0", key="inertia"
            ) from e

        if damping.shape != (6, 6) or np.count_nonzero(damping - np.diag(np.diag(damping))):
            raise ConfigValidationError("damping must be a 6x6 diagonal matrix", invariant="Δ diagonal", key="damping")
        if np.any(np.diag(damping) <= 0.0):
            raise ConfigValidationError("damping coefficients must be positive", invariant="Δ_ii > 0", key="damping")

        gamma = np.diag(actuation).copy() if actuation.shape == (6, 6) else None
        if gamma is None or np.count_nonzero(actuation - np.diag(gamma)):
            raise ConfigValidationError("actuation must be a 6x6 diagonal matrix", invariant="Γ diagonal", key="gamma")
        if not np.all(np.isin(gamma, (0.0, 1.0))):
            raise ConfigValidationError("actuation entries must be 0 or 1", invariant="Γ_ii ∈ {0,1}", key="gamma")
        gamma[list(_FORCED_ACTUATED)] = 1.0

        object.__setattr__(self, "inertia", inertia)
        object.__setattr__(self, "linear_damping", damping)
        object.__setattr__(self, "actuation", np.diag(gamma))
        object.__setattr__(self, "_inertia_inv", np.linalg.inv(inertia))

    @property
    def inertia_inv(self) -> np.ndarray:
        return self._inertia_inv  # type: ignore[attr-defined]

    @classmethod
    def ellipsoid(cls, *, underactuated: bool = True, **kwargs) -> VehiclePlant:
        gamma = ELLIPSOID_UNDERACTUATED_GAMMA if underactuated else np.eye(6)
        return cls(inertia=ELLIPSOID_INERTIA, linear_damping=ELLIPSOID_DAMPING, actuation=gamma, **kwargs)

    def restoring_and_coriolis(self, eta: ArrayLike, nu: ArrayLike) -> np.ndarray:
        """μ(η, ν) = C_RB(ν)ν + Δν + g(η)"""
        eta6 = as_vector6(eta)
        nu6 = as_vector6(nu)
        mu = self.linear_damping @ nu6 + self.restoring(eta6)
        if self.include_coriolis:
            mu = mu + coriolis_rigid_body(self.inertia, nu6) @ nu6
        return mu

    def body_disturbance(self, eta: ArrayLike, t: float) -> np.ndarray:
        """τ* = Jᵀ τ*_η(t)"""
        j_mat = jacobian(as_vector6(eta)[3:], self.singularity_margin)
        return j_mat.T @ np.asarray(self.external_disturbance(t), dtype=float)


def plant_derivative(
    plant: VehiclePlant,
    eta: Configuration | ArrayLike,
    nu: Pseudovelocity | ArrayLike,
    tau: ArrayLike,
    t: float,
) -> tuple[np.ndarray, np.ndarray]:
    """(η̇, ν̇)：η̇ = J ν，ν̇ = −M⁻¹[μ + τ*] + M⁻¹ Γ τ"""
    eta6 = as_vector6(eta)
    nu6 = as_vector6(nu)
    tau6 = np.asarray(tau, dtype=float).reshape(6)
    ensure_finite("eta", eta6)
    ensure_finite("nu", nu6)
    ensure_finite("tau", tau6)

    j_mat = jacobian(eta6[3:], plant.singularity_margin)
    tau_star = j_mat.T @ np.asarray(plant.external_disturbance(t), dtype=float)
    mu = plant.restoring_and_coriolis(eta6, nu6)
    eta_dot = j_mat @ nu6
    nu_dot = plant.inertia_inv @ (plant.actuation @ tau6 - mu - tau_star)
    return eta_dot, nu_dot
