"""
指令速度缩放：先按公共比例因子限幅（保持方向），再逐分量限速率。

可以只在初始过渡段内生效（VelocityLimits.until），之后指令原样下发。
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.errors import ConfigValidationError


@dataclass(frozen=True)
class VelocityLimits:
    # m/s 与 rad/s 共用一个上限
    magnitude: float = 8.0
    # 每秒允许的变化量
    rate: float = 2.0
    enabled: bool = True
    # 过渡段结束时刻 [s]；None 表示一直生效
    until: float | None = None

    def __post_init__(self) -> None:
        if self.magnitude <= 0.0:
            raise ConfigValidationError("velocity magnitude limit must be positive", invariant="limit > 0", key="magnitude")
        if self.rate <= 0.0:
            raise ConfigValidationError("velocity rate limit must be positive", invariant="rate > 0", key="rate")
        if self.until is not None and not self.until > 0.0:
            raise ConfigValidationError("limit window must be positive", invariant="until > 0", key="until")

    def active(self, t: float | None) -> bool:
        if not self.enabled:
            return False
        return self.until is None or t is None or t < self.until


def scale_commanded_velocities(
    nu_c: ArrayLike,
    previous: ArrayLike | None,
    dt: float,
    limits: VelocityLimits,
) -> np.ndarray:
    cmd = np.asarray(nu_c, dtype=float)
    if not limits.enabled:
        return cmd.copy()
    if dt <= 0.0:
        raise ConfigValidationError("dt must be positive", invariant="dt > 0", key="dt")

    peak = float(np.max(np.abs(cmd))) if cmd.size else 0.0
    if peak > limits.magnitude:
        cmd = cmd * (limits.magnitude / peak)

    if previous is None:
        return cmd
    prev = np.asarray(previous, dtype=float)
    max_delta = limits.rate * dt
    return prev + np.clip(cmd - prev, -max_delta, max_delta)


class RateLimiter:
    """记住上一次的输出，作为下一次限速率的基准"""

    def __init__(self, limits: VelocityLimits, size: int, initial: ArrayLike | None = None):
        self.limits = limits
        self.size = size
        self.last = np.zeros(size) if initial is None else np.asarray(initial, dtype=float).reshape(size).copy()

    def reset(self, initial: ArrayLike | None = None) -> None:
        self.last = np.zeros(self.size) if initial is None else np.asarray(initial, dtype=float).reshape(self.size).copy()

    def __call__(self, value: ArrayLike, dt: float, t: float | None = None) -> np.ndarray:
        if self.limits.active(t):
            out = scale_commanded_velocities(value, self.last, dt, self.limits)
        else:
            out = np.asarray(value, dtype=float).reshape(self.size).copy()
        self.last = out.copy()
        return out
