"""
VFO 外环（运动学层）

只使用构型 η、ESO 输出（ε̂、ε̂̇）与路径几何；从不读取本体速度 ν（输出反馈）。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.control.scaling import RateLimiter, VelocityLimits
from vfo_adr_sim.dynamics.rigid_body import rotation_matrix
from vfo_adr_sim.errors import ConfigValidationError, FrozenState, NoPriorState
from vfo_adr_sim.paths.geometry import FrameRates, PathFrame, PathSpec, evaluate_frame, frame_time_derivatives
from vfo_adr_sim.utils import TWO_PI, atan2_left, wrap_to_pi_left

DEFAULT_FREEZE_EPSILON = 1e-6


@dataclass(frozen=True)
class VfoGains:
    k_p: float = 2.0
    k_theta: float = 4.0
    k_psi: float = 4.0
    k_phi: float = 5.0
    delta_p: float = 0.75
    delta_o: float = 1.0

    def __post_init__(self) -> None:
        # 允许 0：用于开环/退化场景
        for name in ("k_p", "k_theta", "k_psi", "k_phi"):
            value = getattr(self, name)
            if not (value >= 0.0 and math.isfinite(value)):
                raise ConfigValidationError(f"{name} must be non-negative", invariant=f"{name} ≥ 0", key=name)
        if not (0.0 <= self.delta_p < 1.0):
            raise ConfigValidationError("delta_p must lie in [0, 1)", invariant="δ_p ∈ [0, 1)", key="delta_p")
        if not (0.0 <= self.delta_o <= 1.0):
            raise ConfigValidationError("delta_o must lie in [0, 1]", invariant="δ_o ∈ [0, 1]", key="delta_o")

    @property
    def angular_gain(self) -> np.ndarray:
        """K_a = diag(k_θ, k_ψ)"""
        return np.diag([self.k_theta, self.k_psi])


@dataclass
class AuxiliaryState:
    psi_a_continuous: float | None = None
    # 最近一次有效的 (θ_a, ψ_a, θ̇_a, ψ̇_a)
    frozen_orientation: tuple[float, float, float, float] | None = None
    freeze_epsilon: float = DEFAULT_FREEZE_EPSILON
    is_frozen: bool = False

    def remember_rates(self, theta_a_dot: float, psi_a_dot: float) -> None:
        if self.frozen_orientation is None:
            raise NoPriorState("no auxiliary orientation recorded yet")
        theta_a, psi_a, _, _ = self.frozen_orientation
        self.frozen_orientation = (theta_a, psi_a, theta_a_dot, psi_a_dot)


@dataclass(frozen=True)
class CommandedVelocity:
    u_c: float
    p_c: float
    q_c: float
    r_c: float
    # 鱼雷式运动：横移/垂荡指令恒为零
    v_c: float = field(default=0.0, init=False)
    w_c: float = field(default=0.0, init=False)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.u_c, self.v_c, self.w_c, self.p_c, self.q_c, self.r_c])

    @property
    def reduced(self) -> np.ndarray:
        """ν̄_c = (u_c, q_c, r_c)"""
        return np.array([self.u_c, self.q_c, self.r_c])

    def with_roll(self, p_c: float) -> CommandedVelocity:
        return CommandedVelocity(u_c=self.u_c, p_c=p_c, q_c=self.q_c, r_c=self.r_c)


def atan2c(y: float, x: float, previous: float | None) -> float:
    """连续四象限反正切：主值 + 2πk，k 取使与上一次取值跳变最小的整数"""
    if previous is None:
        return atan2_left(y, x)
    angle = math.atan2(y, x)
    return angle + TWO_PI * round((previous - angle) / TWO_PI)


def convergence_field_longitudinal(frame: PathFrame, gains: VfoGains, u_d: float, eps_hat_p: ArrayLike) -> np.ndarray:
    """ĥ*_p = u_d ϑ_⊥ + k_p(s₁ϑ₁ + s₂ϑ₂) + δ_p ε̂_p"""
    s1, s2 = frame.s_values
    n1, n2 = frame.normals
    h_p = u_d * frame.tangent + gains.k_p * (s1 * n1 + s2 * n2)
    return h_p + gains.delta_p * np.asarray(eps_hat_p, dtype=float).reshape(3)


def auxiliary_orientation(h_p: ArrayLike, xi_d: int, state: AuxiliaryState) -> tuple[float, float, AuxiliaryState]:
    hx, hy, hz = (float(v) for v in np.asarray(h_p, dtype=float).reshape(3))
    if hx * hx + hy * hy < state.freeze_epsilon:
        if state.frozen_orientation is None:
            raise NoPriorState("auxiliary orientation undefined on the first evaluation", planar_norm_sq=hx * hx + hy * hy)
        state.is_frozen = True
        theta_a, psi_a, _, _ = state.frozen_orientation
        return theta_a, psi_a, state

    psi_a = atan2c(xi_d * hy, xi_d * hx, state.psi_a_continuous)
    theta_a = math.atan(-hz / (hx * math.cos(psi_a) + hy * math.sin(psi_a)))
    state.psi_a_continuous = psi_a
    state.is_frozen = False
    prev_rates = (0.0, 0.0) if state.frozen_orientation is None else state.frozen_orientation[2:]
    state.frozen_orientation = (theta_a, psi_a, prev_rates[0], prev_rates[1])
    return theta_a, psi_a, state


def auxiliary_orientation_derivative(
    h_p: ArrayLike,
    h_p_dot: ArrayLike,
    theta_a: float,
    psi_a: float,
    freeze_epsilon: float = DEFAULT_FREEZE_EPSILON,
) -> tuple[float, float]:
    """(θ̇_a, ψ̇_a)"""
    hx, hy, hz = (float(v) for v in np.asarray(h_p, dtype=float).reshape(3))
    dhx, dhy, dhz = (float(v) for v in np.asarray(h_p_dot, dtype=float).reshape(3))
    planar_sq = hx * hx + hy * hy
    if planar_sq < freeze_epsilon:
        raise FrozenState("auxiliary orientation rate undefined, reuse previous value", planar_norm_sq=planar_sq)

    psi_a_dot = (dhy * hx - dhx * hy) / planar_sq
    c, s = math.cos(psi_a), math.sin(psi_a)
    horizontal = hx * c + hy * s
    beta2 = dhz * horizontal - hz * (dhx * c + dhy * s - hx * psi_a_dot * s + hy * psi_a_dot * c)
    beta3 = hz * hz + horizontal * horizontal
    return -beta2 / beta3, psi_a_dot


def hdot_longitudinal_estimate(
    frame: PathFrame,
    rates: FrameRates,
    gains: VfoGains,
    u_d: float,
    eps_hat_p_dot: ArrayLike,
) -> np.ndarray:
    """ĥ̇*_p = u_d ϑ̇_⊥ + k_p(ṡ₁ϑ₁ + s₁ϑ̇₁ + ṡ₂ϑ₂ + s₂ϑ̇₂) + δ_p ε̂̇_p"""
    s1, s2 = frame.s_values
    n1, n2 = frame.normals
    ds1, ds2 = rates.s_dot
    dn1, dn2 = rates.normals_dot
    out = u_d * rates.tangent_dot + gains.k_p * (ds1 * n1 + s1 * dn1 + ds2 * n2 + s2 * dn2)
    return out + gains.delta_p * np.asarray(eps_hat_p_dot, dtype=float).reshape(3)


def auxiliary_error(theta_a: float, psi_a: float, attitude: ArrayLike) -> np.ndarray:
    """ē_a = (θ_a − θ, ψ_a − ψ)，俯仰分量映射到 [−π, π)，偏航分量保持在实数轴上"""
    att = np.asarray(attitude, dtype=float)
    return np.array([wrap_to_pi_left(theta_a - float(att[1])), psi_a - float(att[2])])


def convergence_field_angular(
    theta_a: float,
    psi_a: float,
    theta_a_dot: float,
    psi_a_dot: float,
    attitude: ArrayLike,
    gains: VfoGains,
    eps_hat_o: ArrayLike,
) -> np.ndarray:
    """ĥ*_o = (θ̇_a, ψ̇_a) + K_a ē_a + δ_o ε̂_o"""
    e_a = auxiliary_error(theta_a, psi_a, attitude)
    return (
        np.array([theta_a_dot, psi_a_dot])
        + gains.angular_gain @ e_a
        + gains.delta_o * np.asarray(eps_hat_o, dtype=float).reshape(2)
    )


def commanded_velocities(h_p: ArrayLike, h_o: ArrayLike, attitude: ArrayLike) -> CommandedVelocity:
    """u_c、q_c、r_c；p_c 由 roll_stabilizer 给出，这里置零"""
    hx, hy, hz = np.asarray(h_p, dtype=float).reshape(3)
    h_theta, h_psi = np.asarray(h_o, dtype=float).reshape(2)
    _, theta, psi = np.asarray(attitude, dtype=float).reshape(3)
    cth, sth = math.cos(theta), math.sin(theta)
    u_c = hx * cth * math.cos(psi) + hy * cth * math.sin(psi) - hz * sth
    return CommandedVelocity(u_c=float(u_c), p_c=0.0, q_c=float(h_theta), r_c=float(h_psi * cth))


RollFeedback = Callable[[np.ndarray, VfoGains], float]


def proportional_roll_feedback(attitude: np.ndarray, gains: VfoGains) -> float:
    """f_φ = −k_φ φ"""
    return -gains.k_phi * float(attitude[0])


def roll_stabilizer(
    attitude: ArrayLike,
    q_c: float,
    r_c: float,
    gains: VfoGains,
    roll_feedback: RollFeedback = proportional_roll_feedback,
) -> float:
    """p_c = f_φ − sφ tθ q_c − cφ tθ r_c"""
    att = np.asarray(attitude, dtype=float).reshape(3)
    phi, theta = float(att[0]), float(att[1])
    tth = math.tan(theta)
    return roll_feedback(att, gains) - math.sin(phi) * tth * q_c - math.cos(phi) * tth * r_c


@dataclass(frozen=True)
class VfoOutput:
    frame: PathFrame
    rates: FrameRates
    h_p: np.ndarray
    h_p_dot: np.ndarray
    theta_a: float
    psi_a: float
    theta_a_dot: float
    psi_a_dot: float
    e_a: np.ndarray
    h_o: np.ndarray
    nu_c_raw: np.ndarray
    nu_c: np.ndarray
    frozen: bool


class VfoController:
    """单个载体的 VFO 外环；AuxiliaryState 与限速率器是仅有的可变状态"""

    def __init__(
        self,
        path: PathSpec,
        gains: VfoGains,
        *,
        limits: VelocityLimits | None = None,
        roll_feedback: RollFeedback = proportional_roll_feedback,
        freeze_epsilon: float = DEFAULT_FREEZE_EPSILON,
    ):
        self.path = path
        self.gains = gains
        self.limits = limits or VelocityLimits()
        self.roll_feedback = roll_feedback
        self.state = AuxiliaryState(freeze_epsilon=freeze_epsilon)
        # ν̄_c = (u_c, q_c, r_c) 与 p_c 分别限幅/限速率
        self._reduced_limiter = RateLimiter(self.limits, 3)
        self._roll_limiter = RateLimiter(self.limits, 1)

    def reset(self) -> None:
        self.state = AuxiliaryState(freeze_epsilon=self.state.freeze_epsilon)
        self._reduced_limiter.reset()
        self._roll_limiter.reset()

    def step(
        self,
        eta: ArrayLike,
        eps_hat: ArrayLike,
        eps_hat_dot: ArrayLike,
        applied_nu_c: ArrayLike,
        dt: float,
        *,
        t: float | None = None,
        compensate: bool = True,
    ) -> VfoOutput:
        """
        eta：当前构型；eps_hat / eps_hat_dot：ESO 给出的 ε̂ 与 ε̂̇；
        applied_nu_c：上一步实际下发的 ν_c，用于 η̇_pc = R ν_c,p。

        compensate=False 时 ε̂、ε̂̇ 按零处理（内环被抑制、观测器仍处于峰值阶段）；
        t 只用于判断限幅是否仍在过渡段内。
        """
        eta6 = np.asarray(eta, dtype=float).reshape(6)
        if compensate:
            eps6 = np.asarray(eps_hat, dtype=float).reshape(6)
            eps_dot6 = np.asarray(eps_hat_dot, dtype=float).reshape(6)
        else:
            eps6 = np.zeros(6)
            eps_dot6 = np.zeros(6)
        attitude = eta6[3:]
        position = eta6[:3]
        u_d = self.path.speed

        frame = evaluate_frame(self.path, position)
        h_p = convergence_field_longitudinal(frame, self.gains, u_d, eps6[:3])
        theta_a, psi_a, _ = auxiliary_orientation(h_p, self.path.strategy, self.state)

        # 输出反馈版本：η̇_p ≈ η̇_pc − ε̂_p
        position_rate = rotation_matrix(attitude) @ np.asarray(applied_nu_c, dtype=float).reshape(6)[:3] - eps6[:3]
        rates = frame_time_derivatives(self.path, position, position_rate, frame)
        h_p_dot = hdot_longitudinal_estimate(frame, rates, self.gains, u_d, eps_dot6[:3])

        try:
            theta_a_dot, psi_a_dot = auxiliary_orientation_derivative(
                h_p, h_p_dot, theta_a, psi_a, self.state.freeze_epsilon
            )
            self.state.remember_rates(theta_a_dot, psi_a_dot)
        except FrozenState:
            _, _, theta_a_dot, psi_a_dot = self.state.frozen_orientation

        e_a = auxiliary_error(theta_a, psi_a, attitude)
        h_o = convergence_field_angular(
            theta_a, psi_a, theta_a_dot, psi_a_dot, attitude, self.gains, eps6[4:6]
        )
        cmd = commanded_velocities(h_p, h_o, attitude)
        p_raw = roll_stabilizer(attitude, cmd.q_c, cmd.r_c, self.gains, self.roll_feedback)
        nu_c_raw = cmd.with_roll(p_raw).vector

        u_c, q_c, r_c = self._reduced_limiter(cmd.reduced, dt, t)
        p_c = roll_stabilizer(attitude, q_c, r_c, self.gains, self.roll_feedback)
        (p_c,) = self._roll_limiter(np.array([p_c]), dt, t)
        nu_c = CommandedVelocity(u_c=float(u_c), p_c=float(p_c), q_c=float(q_c), r_c=float(r_c)).vector

        return VfoOutput(
            frame=frame,
            rates=rates,
            h_p=h_p,
            h_p_dot=h_p_dot,
            theta_a=theta_a,
            psi_a=psi_a,
            theta_a_dot=float(theta_a_dot),
            psi_a_dot=float(psi_a_dot),
            e_a=e_a,
            h_o=h_o,
            nu_c_raw=nu_c_raw,
            nu_c=nu_c,
            frozen=self.state.is_frozen,
        )
