"""
仿真器专用诊断量：跟踪误差、真值总扰动、期望/辅助偏航与俯仰角之差及其上界。

这些量会用到被控对象的真值（ν、ν̇、ε），只用于评估，不回灌到控制器。
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.control.vfo import VfoGains
from vfo_adr_sim.dynamics.plant import VehiclePlant
from vfo_adr_sim.dynamics.rigid_body import (
    DEFAULT_SINGULARITY_MARGIN,
    angular_velocity_transform_derivatives,
    angular_velocity_transforms,
    apply_jacobians,
    jacobian,
    jacobian_derivative,
    rotation_matrices,
)
from vfo_adr_sim.paths.geometry import PathFrame, PathSpec, desired_orientation
from vfo_adr_sim.simulation.trace import SimulationTrace
from vfo_adr_sim.utils import wrap_to_pi, wrap_to_pi_left, wrap_to_pi_left_array


def path_following_error(eta: ArrayLike, path: PathSpec, frame: PathFrame) -> tuple[np.ndarray, np.ndarray]:
    """
    e = (s₁, s₂, φ_d − φ, θ_d − θ, ψ_d − ψ)，偏航误差在实数轴上；
    e_2π 把三个角度分量映射到 (−π, π]。
    """
    eta6 = np.asarray(eta, dtype=float).reshape(6)
    psi_d, theta_d, phi_d = desired_orientation(path, frame)
    s1, s2 = frame.s_values
    e = np.array([s1, s2, phi_d - eta6[3], theta_d - eta6[4], psi_d - eta6[5]])
    e_2pi = e.copy()
    for i in (2, 3, 4):
        e_2pi[i] = wrap_to_pi(e[i])
    return e, e_2pi


def ground_truth_disturbance(
    eta: ArrayLike,
    nu: ArrayLike,
    nu_dot: ArrayLike,
    nu_c: ArrayLike,
    nu_c_dot: ArrayLike,
    tau_eta: ArrayLike,
    plant: VehiclePlant,
    B_hat: np.ndarray,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """
    d = ε̇ + J B̂ Γ Jᵀ τ_η，其中 ε̇ = η̈_c − η̈ = J̇(ν_c − ν) + J(ν̇_c − ν̇)。

    ν̇ 来自被控对象方程（解析），ν̇_c 由调用方给出。
    """
    attitude = np.asarray(eta, dtype=float).reshape(6)[3:]
    nu6 = np.asarray(nu, dtype=float).reshape(6)
    j_mat = jacobian(attitude, margin)
    j_dot = jacobian_derivative(attitude, nu6, margin)
    eps_dot = j_dot @ (np.asarray(nu_c, dtype=float) - nu6) + j_mat @ (
        np.asarray(nu_c_dot, dtype=float) - np.asarray(nu_dot, dtype=float)
    )
    return eps_dot + j_mat @ B_hat @ plant.actuation @ j_mat.T @ np.asarray(tau_eta, dtype=float)


def velocity_error(eta: ArrayLike, nu: ArrayLike, nu_c: ArrayLike, margin: float = DEFAULT_SINGULARITY_MARGIN) -> np.ndarray:
    """ε = η̇_c − η̇ = J(ν_c − ν)"""
    attitude = np.asarray(eta, dtype=float).reshape(6)[3:]
    return jacobian(attitude, margin) @ (np.asarray(nu_c, dtype=float) - np.asarray(nu, dtype=float))


@dataclass(frozen=True)
class Discrepancies:
    eps_psi: float
    eps_theta: float
    # |ε_ψ| 的上界
    f_eps_psi: float
    # |ε_θ| 的上界
    f_eps_theta: float

    @property
    def yaw_bound_holds(self) -> bool:
        return abs(self.eps_psi) <= self.f_eps_psi + 1e-9


def yaw_pitch_discrepancies(
    frame: PathFrame,
    h_p: ArrayLike,
    theta_a: float,
    psi_a: float,
    path: PathSpec,
    gains: VfoGains,
    eps_hat_p: ArrayLike,
    eps_p: ArrayLike | None = None,
) -> Discrepancies:
    """
    ε_ψ = ψ_d − ψ_a*（ψ_a* 为 ψ_a 映射到 [−π, π)），ε_θ 为 θ_d − θ_a 的闭式。

    eps_p 为真实速度误差 ε_p；缺省时视为 ε̃_p = 0。

    f_εψ 的分母取 ĥ*_p 水平分量沿 ϑ̄_⊥ 的投影 along 本身而不是 |along|：
    along ≤ 0 时直接返回 π。这比用 |along| 得到的界更保守，是有意的偏离。
    """
    h = np.asarray(h_p, dtype=float).reshape(3)
    eps_hat = np.asarray(eps_hat_p, dtype=float).reshape(3)
    eps_true = eps_hat if eps_p is None else np.asarray(eps_p, dtype=float).reshape(3)
    eps_tilde = eps_true - eps_hat

    psi_d, _, _ = desired_orientation(path, frame)
    psi_a_star = wrap_to_pi_left(psi_a)
    eps_psi = wrap_to_pi_left(psi_d - psi_a_star)

    xi = path.strategy
    vt = frame.tangent
    vt_planar = frame.planar_tangent
    vt_planar_norm = float(np.linalg.norm(vt_planar))
    h_planar_norm = math.hypot(h[0], h[1])
    num = xi * (h[2] * vt_planar_norm - vt[2] * h_planar_norm)
    den = vt_planar_norm * h_planar_norm + h[2] * vt[2]
    eps_theta = math.atan(num / den) if den != 0.0 else math.copysign(0.5 * math.pi, num)

    s1, s2 = frame.s_values
    n1, n2 = frame.normals
    e_p_norm = math.hypot(s1, s2)
    eps_norm = float(np.linalg.norm(eps_true))
    eps_tilde_norm = float(np.linalg.norm(eps_tilde))
    k_p, delta_p, u_d = gains.k_p, gains.delta_p, path.speed

    # 水平投影 h̄ 在 ϑ̄_⊥ 上的分量；非正时上界无意义，取 π
    along = (
        u_d * vt_planar_norm**2
        + k_p * s1 * float(n1[:2] @ vt_planar)
        + k_p * s2 * float(n2[:2] @ vt_planar)
        + delta_p * float(eps_hat[:2] @ vt_planar)
    )
    across = 2.0 * k_p * e_p_norm + delta_p * eps_norm + delta_p * eps_tilde_norm
    f_eps_psi = math.atan2(across, along) if along > 0.0 else math.pi

    eps_sum = eps_norm + eps_tilde_norm
    beta4 = (
        4.0 * delta_p**2 * eps_sum**2
        + 16.0 * k_p * delta_p * eps_sum * e_p_norm
        + 16.0 * k_p**2 * e_p_norm**2
        + 8.0 * u_d * delta_p * eps_sum
        + 16.0 * u_d * k_p * e_p_norm
    )
    beta5 = abs(den * (h[2] * vt_planar_norm + vt[2] * h_planar_norm))
    if beta5 > 0.0:
        f_eps_theta = math.atan(beta4 / beta5)
    else:
        f_eps_theta = 0.0 if beta4 == 0.0 else 0.5 * math.pi

    return Discrepancies(eps_psi=eps_psi, eps_theta=eps_theta, f_eps_psi=f_eps_psi, f_eps_theta=f_eps_theta)


def ground_truth_disturbance_series(
    eta: np.ndarray,
    nu: np.ndarray,
    nu_dot: np.ndarray,
    nu_c: np.ndarray,
    nu_c_dot: np.ndarray,
    tau: np.ndarray,
    plant: VehiclePlant,
    B_hat: np.ndarray,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """
    ground_truth_disturbance 的逐行版本，输入均为 (N, 6)。

    tau 为本体系 τ（即 Jᵀ τ_η），J̇ 沿各自的 ν 求导。
    """
    r_mats = rotation_matrices(eta)
    t_mats = angular_velocity_transforms(eta, margin)
    dnu = nu_c - nu
    omega = nu[:, 3:]
    # Ṙ v = R (ω × v)
    r_dot_term = np.einsum("nij,nj->ni", r_mats, np.cross(omega, dnu[:, :3]))
    attitude_rate = np.einsum("nij,nj->ni", t_mats, omega)
    t_dots = angular_velocity_transform_derivatives(eta, attitude_rate, margin)
    t_dot_term = np.einsum("nij,nj->ni", t_dots, dnu[:, 3:])
    eps_dot = np.concatenate([r_dot_term, t_dot_term], axis=1) + apply_jacobians(r_mats, t_mats, nu_c_dot - nu_dot)
    applied = tau @ (B_hat @ plant.actuation).T
    return eps_dot + apply_jacobians(r_mats, t_mats, applied)


def velocity_error_series(
    eta: np.ndarray, nu: np.ndarray, nu_c: np.ndarray, margin: float = DEFAULT_SINGULARITY_MARGIN
) -> np.ndarray:
    """逐行 ε = J(ν_c − ν)"""
    return apply_jacobians(rotation_matrices(eta), angular_velocity_transforms(eta, margin), nu_c - nu)


def yaw_pitch_discrepancy_series(
    tangent: np.ndarray,
    normals: np.ndarray,
    s_values: np.ndarray,
    h_p: np.ndarray,
    psi_a: np.ndarray,
    path: PathSpec,
    gains: VfoGains,
    eps_hat_p: np.ndarray,
    eps_p: np.ndarray,
) -> dict[str, np.ndarray]:
    """
    yaw_pitch_discrepancies 的逐行版本。

    tangent (N, 3)；normals (N, 6) 为 ϑ₁、ϑ₂ 依次拼接；s_values (N, 2)。
    返回 eps_psi、eps_theta、f_eps_psi、f_eps_theta 四个 (N,) 数组。
    """
    xi = path.strategy
    vt_planar = tangent[:, :2]
    vt_planar_norm = np.linalg.norm(vt_planar, axis=1)
    psi_d = wrap_to_pi_left_array(np.arctan2(xi * tangent[:, 1], xi * tangent[:, 0]))
    eps_psi = wrap_to_pi_left_array(psi_d - wrap_to_pi_left_array(psi_a))

    h_planar_norm = np.hypot(h_p[:, 0], h_p[:, 1])
    num = xi * (h_p[:, 2] * vt_planar_norm - tangent[:, 2] * h_planar_norm)
    den = vt_planar_norm * h_planar_norm + h_p[:, 2] * tangent[:, 2]
    safe_den = np.where(den != 0.0, den, 1.0)
    eps_theta = np.where(den != 0.0, np.arctan(num / safe_den), np.copysign(0.5 * math.pi, num))

    s1, s2 = s_values[:, 0], s_values[:, 1]
    n1, n2 = normals[:, :3], normals[:, 3:]
    e_p_norm = np.hypot(s1, s2)
    eps_norm = np.linalg.norm(eps_p, axis=1)
    eps_tilde_norm = np.linalg.norm(eps_p - eps_hat_p, axis=1)
    k_p, delta_p, u_d = gains.k_p, gains.delta_p, path.speed

    along = (
        u_d * vt_planar_norm**2
        + k_p * s1 * np.einsum("ni,ni->n", n1[:, :2], vt_planar)
        + k_p * s2 * np.einsum("ni,ni->n", n2[:, :2], vt_planar)
        + delta_p * np.einsum("ni,ni->n", eps_hat_p[:, :2], vt_planar)
    )
    across = 2.0 * k_p * e_p_norm + delta_p * eps_norm + delta_p * eps_tilde_norm
    f_eps_psi = np.where(along > 0.0, np.arctan2(across, along), math.pi)

    eps_sum = eps_norm + eps_tilde_norm
    beta4 = (
        4.0 * delta_p**2 * eps_sum**2
        + 16.0 * k_p * delta_p * eps_sum * e_p_norm
        + 16.0 * k_p**2 * e_p_norm**2
        + 8.0 * u_d * delta_p * eps_sum
        + 16.0 * u_d * k_p * e_p_norm
    )
    beta5 = np.abs(den * (h_p[:, 2] * vt_planar_norm + tangent[:, 2] * h_planar_norm))
    safe_beta5 = np.where(beta5 > 0.0, beta5, 1.0)
    f_eps_theta = np.where(
        beta5 > 0.0,
        np.arctan(beta4 / safe_beta5),
        np.where(beta4 == 0.0, 0.0, 0.5 * math.pi),
    )
    return {"eps_psi": eps_psi, "eps_theta": eps_theta, "f_eps_psi": f_eps_psi, "f_eps_theta": f_eps_theta}


def fill_trace_diagnostics(
    trace: SimulationTrace,
    plant: VehiclePlant,
    path: PathSpec,
    gains: VfoGains,
    B_hat: np.ndarray,
    dt: float,
) -> None:
    """积分结束后一次性补齐 d、ε 与偏航/俯仰差；控制回路中只记录原始量"""
    if len(trace) == 0:
        return
    s = trace.series
    margin = plant.singularity_margin
    # 第一个采样点之前下发的 ν_c 为零
    nu_c_dot = np.diff(s["nu_c"], axis=0, prepend=np.zeros((1, 6))) / dt
    s["d"][:] = ground_truth_disturbance_series(
        s["eta"], s["nu"], s["nu_dot"], s["nu_c"], nu_c_dot, s["tau"], plant, B_hat, margin
    )
    s["eps"][:] = velocity_error_series(s["eta"], s["nu"], s["nu_c"], margin)
    # 抑制窗口内外环没有使用 ε̂
    eps_hat_used = s["eps_hat"][:, :3] * s["compensated"][:, None]
    disc = yaw_pitch_discrepancy_series(
        s["tangent"],
        s["normals"],
        s["e"][:, :2],
        s["h_p"],
        s["aux_orientation"][:, 1],
        path,
        gains,
        eps_hat_used,
        s["eps"][:, :3],
    )
    for name, values in disc.items():
        s[name][:] = values
