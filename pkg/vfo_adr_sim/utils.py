from __future__ import annotations

import hashlib
import json
import math
from typing import Any

import numpy as np

from vfo_adr_sim.errors import NonFiniteState

TWO_PI = 2.0 * math.pi


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _canonical(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_canonical(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        # 最短往返表示
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def canonical_json(data: Any) -> str:
    """排序键、无空白、浮点数统一用 repr，用于配置哈希"""
    return json.dumps(_canonical(data), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def config_hash(data: Any) -> str:
    return sha256_text(canonical_json(data))


def wrap_to_pi(angle: float) -> float:
    """映射到 (−π, π]"""
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def wrap_to_pi_left(angle: float) -> float:
    """映射到 [−π, π)"""
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


def wrap_to_pi_left_array(angles: np.ndarray) -> np.ndarray:
    """逐元素映射到 [−π, π)"""
    return np.mod(np.asarray(angles, dtype=float) + math.pi, TWO_PI) - math.pi


def atan2_left(y: float, x: float) -> float:
    """四象限反正切，值域 [−π, π)"""
    return wrap_to_pi_left(math.atan2(y, x))


def skew(v: np.ndarray) -> np.ndarray:
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def ensure_finite(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteState(f"{name} contains NaN/Inf", quantity=name)
