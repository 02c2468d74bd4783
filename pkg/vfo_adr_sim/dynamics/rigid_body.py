"""
6-DoF 刚体运动学：RPY 欧拉角下的 R(η_o)、T(η_o)、J(η_o) 及其逆与时间导数。

约定：η = [x y z φ θ ψ]ᵀ（全局系 {G}），ν = [u v w p q r]ᵀ（本体系 {B}）。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.errors import SingularAttitude
from vfo_adr_sim.utils import ensure_finite, skew

DEFAULT_SINGULARITY_MARGIN = 1e-6


@dataclass(frozen=True)
class Configuration:
    """η：位置 [m] + RPY 姿态 [rad]"""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "attitude", np.asarray(self.attitude, dtype=float).reshape(3))

    @classmethod
    def from_vector(cls, eta: ArrayLike) -> Configuration:
        eta = np.asarray(eta, dtype=float)
        return cls(position=eta[:3], attitude=eta[3:6])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.attitude])

    @property
    def roll(self) -> float:
        return float(self.attitude[0])

    @property
    def pitch(self) -> float:
        return float(self.attitude[1])

    @property
    def yaw(self) -> float:
        return float(self.attitude[2])

    def check_admissible(self, margin: float = DEFAULT_SINGULARITY_MARGIN) -> None:
        ensure_finite("configuration", self.vector)
        check_pitch(self.attitude, margin)


@dataclass(frozen=True)
class Pseudovelocity:
    """ν：本体系线速度 [m/s] + 角速度 [rad/s]"""

    linear: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=float).reshape(3))
        object.__setattr__(self, "angular", np.asarray(self.angular, dtype=float).reshape(3))
        ensure_finite("pseudovelocity", self.vector)

    @classmethod
    def from_vector(cls, nu: ArrayLike) -> Pseudovelocity:
        nu = np.asarray(nu, dtype=float)
        return cls(linear=nu[:3], angular=nu[3:6])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])


def as_vector6(value: Configuration | Pseudovelocity | ArrayLike) -> np.ndarray:
    if isinstance(value, (Configuration, Pseudovelocity)):
        return value.vector
    return np.asarray(value, dtype=float).reshape(6)


def _attitude(value: Configuration | ArrayLike) -> np.ndarray:
    if isinstance(value, Configuration):
        return value.attitude
    arr = np.asarray(value, dtype=float)
    # 既接受 η_o（3 维）也接受完整的 η（6 维）
    return arr[3:6] if arr.shape[0] == 6 else arr


def check_pitch(attitude: ArrayLike, margin: float = DEFAULT_SINGULARITY_MARGIN) -> float:
    """返回 cos θ；|cos θ| < margin 时抛出 SingularAttitude"""
    theta = float(np.asarray(attitude)[1])
    c_theta = math.cos(theta)
    if not math.isfinite(theta) or abs(c_theta) < margin or abs(theta) >= 0.5 * math.pi:
        raise SingularAttitude(
            f"pitch angle {theta!r} too close to ±π/2",
            theta=theta,
            margin=margin,
        )
    return c_theta


def rotation_matrix(attitude: Configuration | ArrayLike) -> np.ndarray:
    """R(η_o) = R_z(ψ) R_y(θ) R_x(φ)"""
    phi, theta, psi = _attitude(attitude)
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cpsi * cth, cpsi * sphi * sth - cphi * spsi, cpsi * cphi * sth + sphi * spsi],
            [spsi * cth, spsi * sphi * sth + cphi * cpsi, spsi * cphi * sth - sphi * cpsi],
            [-sth, sphi * cth, cphi * cth],
        ]
    )


def angular_velocity_transform(
    attitude: Configuration | ArrayLike,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """T(η_o)：η̇_o = T ν_o"""
    att = _attitude(attitude)
    cth = check_pitch(att, margin)
    phi, theta = att[0], att[1]
    cphi, sphi = math.cos(phi), math.sin(phi)
    tth = math.tan(theta)
    return np.array(
        [
            [1.0, sphi * tth, cphi * tth],
            [0.0, cphi, -sphi],
            [0.0, sphi / cth, cphi / cth],
        ]
    )


def angular_velocity_transform_inverse(
    attitude: Configuration | ArrayLike,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """T⁻¹(η_o) 闭式"""
    att = _attitude(attitude)
    cth = check_pitch(att, margin)
    phi, theta = att[0], att[1]
    cphi, sphi = math.cos(phi), math.sin(phi)
    sth = math.sin(theta)
    return np.array(
        [
            [1.0, 0.0, -sth],
            [0.0, cphi, cth * sphi],
            [0.0, -sphi, cth * cphi],
        ]
    )


def kinematic_blocks(attitude: ArrayLike, margin: float = DEFAULT_SINGULARITY_MARGIN) -> tuple[np.ndarray, np.ndarray]:
    """(R, T)：积分器内层使用，三角函数只算一次"""
    phi, theta, psi = (float(v) for v in attitude)
    cth = math.cos(theta)
    if not math.isfinite(theta) or abs(cth) < margin or abs(theta) >= 0.5 * math.pi:
        raise SingularAttitude(f"pitch angle {theta!r} too close to ±π/2", theta=theta, margin=margin)
    cphi, sphi = math.cos(phi), math.sin(phi)
    sth = math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    tth = sth / cth
    r_mat = np.array(
        [
            [cpsi * cth, cpsi * sphi * sth - cphi * spsi, cpsi * cphi * sth + sphi * spsi],
            [spsi * cth, spsi * sphi * sth + cphi * cpsi, spsi * cphi * sth - sphi * cpsi],
            [-sth, sphi * cth, cphi * cth],
        ]
    )
    t_mat = np.array(
        [
            [1.0, sphi * tth, cphi * tth],
            [0.0, cphi, -sphi],
            [0.0, sphi / cth, cphi / cth],
        ]
    )
    return r_mat, t_mat


def jacobian(attitude: Configuration | ArrayLike, margin: float = DEFAULT_SINGULARITY_MARGIN) -> np.ndarray:
    """J = blkdiag(R, T)"""
    out = np.zeros((6, 6))
    out[:3, :3] = rotation_matrix(attitude)
    out[3:, 3:] = angular_velocity_transform(attitude, margin)
    return out


def jacobian_inverse(attitude: Configuration | ArrayLike, margin: float = DEFAULT_SINGULARITY_MARGIN) -> np.ndarray:
    """J⁻¹ = blkdiag(Rᵀ, T⁻¹)"""
    out = np.zeros((6, 6))
    out[:3, :3] = rotation_matrix(attitude).T
    out[3:, 3:] = angular_velocity_transform_inverse(attitude, margin)
    return out


def rotation_matrix_derivative(attitude: Configuration | ArrayLike, angular_rate_body: ArrayLike) -> np.ndarray:
    """Ṙ = R S(ν_o)"""
    return rotation_matrix(attitude) @ skew(np.asarray(angular_rate_body, dtype=float))


def angular_velocity_transform_derivative(
    attitude: Configuration | ArrayLike,
    attitude_rate: ArrayLike,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """Ṫ，attitude_rate = (φ̇, θ̇, ψ̇)"""
    att = _attitude(attitude)
    cth = check_pitch(att, margin)
    phi, theta = att[0], att[1]
    dphi, dtheta = float(attitude_rate[0]), float(attitude_rate[1])
    cphi, sphi = math.cos(phi), math.sin(phi)
    sth, tth = math.sin(theta), math.tan(theta)
    sec2 = 1.0 / (cth * cth)
    return np.array(
        [
            [0.0, cphi * tth * dphi + sphi * sec2 * dtheta, -sphi * tth * dphi + cphi * sec2 * dtheta],
            [0.0, -sphi * dphi, -cphi * dphi],
            [
                0.0,
                cphi * dphi / cth + sphi * sth * sec2 * dtheta,
                -sphi * dphi / cth + cphi * sth * sec2 * dtheta,
            ],
        ]
    )


def jacobian_derivative(
    attitude: Configuration | ArrayLike,
    nu: Pseudovelocity | ArrayLike,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """J̇ 沿当前运动 ν 的时间导数"""
    nu6 = as_vector6(nu)
    att = _attitude(attitude)
    t_mat = angular_velocity_transform(att, margin)
    out = np.zeros((6, 6))
    out[:3, :3] = rotation_matrix_derivative(att, nu6[3:])
    out[3:, 3:] = angular_velocity_transform_derivative(att, t_mat @ nu6[3:], margin)
    return out


def _attitude_rows(attitudes: ArrayLike) -> np.ndarray:
    arr = np.asarray(attitudes, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    # (N, 6) 的构型或 (N, 3) 的姿态
    return arr[:, 3:6] if arr.shape[1] == 6 else arr


def _check_pitch_rows(theta: np.ndarray, margin: float) -> np.ndarray:
    cth = np.cos(theta)
    bad = ~np.isfinite(theta) | (np.abs(cth) < margin) | (np.abs(theta) >= 0.5 * math.pi)
    if np.any(bad):
        first = int(np.argmax(bad))
        raise SingularAttitude(
            f"pitch angle {float(theta[first])!r} too close to ±π/2",
            theta=float(theta[first]),
            margin=margin,
            index=first,
        )
    return cth


def rotation_matrices(attitudes: ArrayLike) -> np.ndarray:
    """逐行 R(η_o)，返回 (N, 3, 3)"""
    att = _attitude_rows(attitudes)
    cphi, sphi = np.cos(att[:, 0]), np.sin(att[:, 0])
    cth, sth = np.cos(att[:, 1]), np.sin(att[:, 1])
    cpsi, spsi = np.cos(att[:, 2]), np.sin(att[:, 2])
    out = np.empty((att.shape[0], 3, 3))
    out[:, 0, 0] = cpsi * cth
    out[:, 0, 1] = cpsi * sphi * sth - cphi * spsi
    out[:, 0, 2] = cpsi * cphi * sth + sphi * spsi
    out[:, 1, 0] = spsi * cth
    out[:, 1, 1] = spsi * sphi * sth + cphi * cpsi
    out[:, 1, 2] = spsi * cphi * sth - sphi * cpsi
    out[:, 2, 0] = -sth
    out[:, 2, 1] = sphi * cth
    out[:, 2, 2] = cphi * cth
    return out


def angular_velocity_transforms(attitudes: ArrayLike, margin: float = DEFAULT_SINGULARITY_MARGIN) -> np.ndarray:
    """逐行 T(η_o)，返回 (N, 3, 3)"""
    att = _attitude_rows(attitudes)
    cth = _check_pitch_rows(att[:, 1], margin)
    cphi, sphi = np.cos(att[:, 0]), np.sin(att[:, 0])
    tth = np.tan(att[:, 1])
    out = np.zeros((att.shape[0], 3, 3))
    out[:, 0, 0] = 1.0
    out[:, 0, 1] = sphi * tth
    out[:, 0, 2] = cphi * tth
    out[:, 1, 1] = cphi
    out[:, 1, 2] = -sphi
    out[:, 2, 1] = sphi / cth
    out[:, 2, 2] = cphi / cth
    return out


def angular_velocity_transform_derivatives(
    attitudes: ArrayLike,
    attitude_rates: ArrayLike,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """逐行 Ṫ，attitude_rates 为 (N, 3) 的 (φ̇, θ̇, ψ̇)"""
    att = _attitude_rows(attitudes)
    rates = np.asarray(attitude_rates, dtype=float).reshape(-1, 3)
    cth = _check_pitch_rows(att[:, 1], margin)
    cphi, sphi = np.cos(att[:, 0]), np.sin(att[:, 0])
    sth, tth = np.sin(att[:, 1]), np.tan(att[:, 1])
    sec2 = 1.0 / (cth * cth)
    dphi, dtheta = rates[:, 0], rates[:, 1]
    out = np.zeros((att.shape[0], 3, 3))
    out[:, 0, 1] = cphi * tth * dphi + sphi * sec2 * dtheta
    out[:, 0, 2] = -sphi * tth * dphi + cphi * sec2 * dtheta
    out[:, 1, 1] = -sphi * dphi
    out[:, 1, 2] = -cphi * dphi
    out[:, 2, 1] = cphi * dphi / cth + sphi * sth * sec2 * dtheta
    out[:, 2, 2] = -sphi * dphi / cth + cphi * sth * sec2 * dtheta
    return out


def apply_jacobians(r_mats: np.ndarray, t_mats: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """逐行 J v = (R v_p, T v_o)"""
    v = np.asarray(vectors, dtype=float).reshape(-1, 6)
    return np.concatenate(
        [np.einsum("nij,nj->ni", r_mats, v[:, :3]), np.einsum("nij,nj->ni", t_mats, v[:, 3:])],
        axis=1,
    )
