"""
ADR 内环：误差域扩张状态观测器（每个自由度一个三阶 LESO）+ 广义力控制律。

x_i = [η_ci − η_i, ε_i, d_i]ᵀ，观测器只依赖 η_c − η 与 τ_η，从不读取本体速度。
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.dynamics.rigid_body import DEFAULT_SINGULARITY_MARGIN, jacobian, jacobian_inverse
from vfo_adr_sim.errors import ConfigValidationError

_A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
_B = np.array([0.0, -1.0, 0.0])
_C = np.array([[1.0, 0.0, 0.0]])


def observer_gains(omega: float) -> np.ndarray:
    """l = (3ω, 3ω², ω³)，特征多项式 (s + ω)³"""
    return np.array([3.0 * omega, 3.0 * omega**2, omega**3])


def eso_matrices(omega: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(A, b, C, l)"""
    return _A.copy(), _B.copy(), _C.copy(), observer_gains(omega)


def _diagonal(value: ArrayLike, name: str, *, allow_zero: bool) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(6, float(arr))
    if arr.ndim == 2:
        if arr.shape != (6, 6) or np.count_nonzero(arr - np.diag(np.diag(arr))):
            raise ConfigValidationError(f"{name} must be a 6x6 diagonal matrix", invariant=f"{name} diagonal", key=name)
        arr = np.diag(arr).copy()
    if arr.shape != (6,):
        raise ConfigValidationError(f"{name} must have 6 diagonal entries", invariant=f"{name} ∈ ℝ⁶ˣ⁶", key=name)
    ok = arr >= 0.0 if allow_zero else arr > 0.0
    if not np.all(ok & np.isfinite(arr)):
        bound = "≥ 0" if allow_zero else "> 0"
        raise ConfigValidationError(f"{name} entries must be {bound}", invariant=f"{name}_ii {bound}", key=name)
    return np.diag(arr)


@dataclass(frozen=True)
class AdrGains:
    K: np.ndarray
    B_hat: np.ndarray

    def __post_init__(self) -> None:
        # K = 0 只用于开环退化场景
        object.__setattr__(self, "K", _diagonal(self.K, "K", allow_zero=True))
        object.__setattr__(self, "B_hat", _diagonal(self.B_hat, "B_hat", allow_zero=False))

    @property
    def B_hat_inv(self) -> np.ndarray:
        return np.diag(1.0 / np.diag(self.B_hat))


@dataclass
class EsoBank:
    # (6, 3)：每行 (x̂₁, x̂₂, x̂₃)
    estimates: np.ndarray
    bandwidths: np.ndarray

    def __post_init__(self) -> None:
        self.estimates = np.asarray(self.estimates, dtype=float).reshape(6, 3).copy()
        bw = np.asarray(self.bandwidths, dtype=float)
        if bw.ndim == 0:
            bw = np.full(6, float(bw))
        if bw.shape != (6,) or not np.all(bw > 0.0):
            raise ConfigValidationError("observer bandwidths must be positive", invariant="ω_oi > 0", key="omega_o")
        self.bandwidths = bw
        self._gains = np.stack([observer_gains(w) for w in bw])

    @classmethod
    def initial(cls, eta0: ArrayLike, bandwidths: ArrayLike | float) -> EsoBank:
        """x̂_i(0) = [−η_i(0), 0, 0]"""
        est = np.zeros((6, 3))
        est[:, 0] = -np.asarray(eta0, dtype=float).reshape(6)
        return cls(estimates=est, bandwidths=bandwidths)

    @property
    def gains(self) -> np.ndarray:
        return self._gains

    @property
    def flat(self) -> np.ndarray:
        return self.estimates.reshape(18).copy()

    def load(self, flat: ArrayLike) -> None:
        self.estimates = np.asarray(flat, dtype=float).reshape(6, 3).copy()


def eso_outputs(bank: EsoBank) -> tuple[np.ndarray, np.ndarray]:
    """(ε̂, d̂)"""
    return bank.estimates[:, 1].copy(), bank.estimates[:, 2].copy()


def eso_input(
    tau_eta: ArrayLike,
    attitude: ArrayLike,
    B_hat: np.ndarray,
    gamma: np.ndarray,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """J B̂ Γ Jᵀ τ_η"""
    j_mat = jacobian(attitude, margin)
    return j_mat @ B_hat @ gamma @ j_mat.T @ np.asarray(tau_eta, dtype=float).reshape(6)


def eso_derivative(
    bank: EsoBank,
    eta_c: ArrayLike,
    eta: ArrayLike,
    tau_eta: ArrayLike,
    attitude: ArrayLike,
    B_hat: np.ndarray,
    gamma: np.ndarray,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> tuple[np.ndarray, np.ndarray]:
    """返回 (x̂̇ 展平成 18 维, ε̂̇)；ε̂̇ 即每个自由度的第二行"""
    u = eso_input(tau_eta, attitude, B_hat, gamma, margin)
    return eso_derivative_from_input(bank.estimates, bank.gains, eta_c, eta, u)


def eso_derivative_from_input(
    estimates: np.ndarray,
    gains: np.ndarray,
    eta_c: ArrayLike,
    eta: ArrayLike,
    u: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(estimates, dtype=float).reshape(6, 3)
    innovation = (np.asarray(eta_c, dtype=float).reshape(6) - np.asarray(eta, dtype=float).reshape(6)) - x[:, 0]
    xdot = np.empty((6, 3))
    xdot[:, 0] = x[:, 1] + gains[:, 0] * innovation
    xdot[:, 1] = x[:, 2] - u + gains[:, 1] * innovation
    xdot[:, 2] = gains[:, 2] * innovation
    return xdot.reshape(18), xdot[:, 1].copy()


def control_force(
    eps_hat: ArrayLike,
    d_hat: ArrayLike,
    attitude: ArrayLike,
    gains: AdrGains,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> tuple[np.ndarray, np.ndarray]:
    """
    τ = B̂⁻¹ J⁻¹ [d̂ + K_η ε̂]，K_η = J K J⁻¹；τ_η = J⁻ᵀ τ。

    返回 (τ, τ_η)。欠驱动分量由被控对象的 Γ 截掉。
    """
    j_mat = jacobian(attitude, margin)
    j_inv = jacobian_inverse(attitude, margin)
    k_eta = j_mat @ gains.K @ j_inv
    tau = gains.B_hat_inv @ j_inv @ (np.asarray(d_hat, dtype=float) + k_eta @ np.asarray(eps_hat, dtype=float))
    tau_eta = j_inv.T @ tau
    return tau, tau_eta


def commanded_configuration_rate(
    eta_c: ArrayLike,
    nu_c: ArrayLike,
    attitude: ArrayLike,
    margin: float = DEFAULT_SINGULARITY_MARGIN,
) -> np.ndarray:
    """η̇_c = J(η_o) ν_c；η_c 本身不参与计算，只是积分对象"""
    return jacobian(attitude, margin) @ np.asarray(nu_c, dtype=float).reshape(6)


class AdrController:
    """持有 EsoBank 与增益；观测器状态由仿真器与被控对象一起积分后写回"""

    def __init__(
        self,
        gains: AdrGains,
        bank: EsoBank,
        gamma: np.ndarray,
        *,
        inhibition_window_s: float = 1.0,
        singularity_margin: float = DEFAULT_SINGULARITY_MARGIN,
    ):
        if inhibition_window_s < 0.0 or not math.isfinite(inhibition_window_s):
            raise ConfigValidationError("inhibition window must be ≥ 0", invariant="window ≥ 0", key="inhibition_window_s")
        self.gains = gains
        self.bank = bank
        self.gamma = np.asarray(gamma, dtype=float)
        self.inhibition_window_s = inhibition_window_s
        self.singularity_margin = singularity_margin

    def inhibited(self, t: float) -> bool:
        return t < self.inhibition_window_s

    def control(self, t: float, eta: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
        """(τ, τ_η)；抑制窗口内两者均为零，观测器照常运行"""
        attitude = np.asarray(eta, dtype=float).reshape(6)[3:]
        if self.inhibited(t):
            # 仍然检查姿态是否可用
            jacobian(attitude, self.singularity_margin)
            return np.zeros(6), np.zeros(6)
        eps_hat, d_hat = eso_outputs(self.bank)
        return control_force(eps_hat, d_hat, attitude, self.gains, self.singularity_margin)

    def observer_input(self, tau_eta: ArrayLike, attitude: ArrayLike) -> np.ndarray:
        return eso_input(tau_eta, attitude, self.gains.B_hat, self.gamma, self.singularity_margin)
