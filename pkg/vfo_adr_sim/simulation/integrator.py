from __future__ import annotations

from typing import Callable

import numpy as np

Derivative = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: Derivative, t: float, x: np.ndarray, dt: float, k1: np.ndarray | None = None) -> np.ndarray:
    """
    经典四阶 Runge–Kutta 单步；输入在步内保持不变由调用方负责。

    调用方已算出 f(t, x) 时可经 k1 传入，省一次求值。
    """
    if k1 is None:
        k1 = f(t, x)
    k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = f(t + dt, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
