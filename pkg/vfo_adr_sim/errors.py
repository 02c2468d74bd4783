from __future__ import annotations

from typing import Any


class SimulationError(Exception):
    """所有仿真/控制相关错误的基类"""

    code = "simulation_error"

    def __init__(self, message: str, code: str | None = None, **context: Any):
        super().__init__(message)
        self.message = message
        self.code = code or self.code
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, **self.context}


class SingularAttitude(SimulationError):
    """|cos θ| 低于奇异裕度，T(η_o) 不可逆"""

    code = "singular_attitude"


class NonFiniteState(SimulationError):
    code = "non_finite_state"


class DegenerateGradient(SimulationError):
    """‖∇s_j‖ 超出允许区间"""

    code = "degenerate_gradient"


class UnboundedHessian(SimulationError):
    """‖∇²s_j‖ 达到上界 M̄_j"""

    code = "hessian_bound"


class CollinearGradients(SimulationError):
    code = "collinear_gradients"


class PlanarTangentDegenerate(SimulationError):
    """切向量在 xy 平面上的投影为零，期望航向无定义"""

    code = "planar_tangent_degenerate"


class NoPriorState(SimulationError):
    code = "no_prior_state"


class FrozenState(SimulationError):
    """ĥ*_x² + ĥ*_y² 低于冻结阈值，导数应沿用上一次的值"""

    code = "frozen_state"


class EmptyWindow(SimulationError):
    code = "empty_window"


class ConfigParseError(SimulationError):
    code = "config_parse_error"

    def __init__(self, message: str, *, path: str = "", line: int | None = None, key: str = ""):
        super().__init__(message, path=path, line=line, key=key)
        self.path = path
        self.line = line
        self.key = key

    def __str__(self) -> str:
        where = self.path or "<config>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        if self.key:
            where = f"{where} [{self.key}]"
        return f"{where}: {self.message}"


class ConfigValidationError(SimulationError):
    """配置违反了某个不变量；invariant 字段给出被违反的约束"""

    code = "config_validation_error"

    def __init__(self, message: str, *, invariant: str = "", key: str = ""):
        super().__init__(message, invariant=invariant, key=key)
        self.invariant = invariant
        self.key = key

    def __str__(self) -> str:
        if self.invariant:
            return f"{self.message} (invariant: {self.invariant})"
        return self.message
