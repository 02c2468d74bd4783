"""
场景配置（JSON）的 pydantic 模型。

键名带单位后缀（horizon_s、step_s、speed_mps ...），未知键一律拒绝。
"""

from __future__ import annotations

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from vfo_adr_sim.control.adr import AdrGains, EsoBank
from vfo_adr_sim.control.scaling import VelocityLimits
from vfo_adr_sim.control.vfo import VfoGains
from vfo_adr_sim.dynamics.plant import (
    ELLIPSOID_DAMPING,
    ELLIPSOID_INERTIA,
    SinusoidalDisturbance,
    VehiclePlant,
    ZeroDisturbance,
)
from vfo_adr_sim.dynamics.rigid_body import DEFAULT_SINGULARITY_MARGIN
from vfo_adr_sim.paths.builtin import path_from_spec
from vfo_adr_sim.paths.geometry import PathSpec


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _six(values: list[float], name: str) -> list[float]:
    if len(values) != 6:
        raise ValueError(f"{name} must have exactly 6 entries")
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"{name} must be finite")
    return values


class PlantConfig(_Strict):
    inertia_si: list[list[float]] = Field(default_factory=lambda: ELLIPSOID_INERTIA.tolist())
    damping_si: list[float] = Field(default_factory=lambda: np.diag(ELLIPSOID_DAMPING).tolist())
    # Γ 对角线；surge/roll/pitch/yaw 会被强制为 1
    actuated: list[Literal[0, 1]] = Field(default_factory=lambda: [1, 0, 0, 1, 1, 1])
    include_coriolis: bool = True

    @field_validator("inertia_si")
    @classmethod
    def _check_inertia(cls, v: list[list[float]]) -> list[list[float]]:
        if len(v) != 6 or any(len(row) != 6 for row in v):
            raise ValueError("inertia_si must be a 6x6 matrix")
        return v

    @field_validator("damping_si")
    @classmethod
    def _check_damping(cls, v: list[float]) -> list[float]:
        _six(v, "damping_si")
        if any(x <= 0.0 for x in v):
            raise ValueError("damping coefficients must be positive")
        return v

    @field_validator("actuated")
    @classmethod
    def _check_actuated(cls, v: list[int]) -> list[int]:
        if len(v) != 6:
            raise ValueError("actuated must have exactly 6 entries")
        return v


class DisturbanceConfig(_Strict):
    kind: Literal["none", "sinusoidal"] = "none"
    # {G} 系下 τ*_η 各分量：a_i sin(ω_i t + φ_i)
    amplitudes_si: list[float] = Field(default_factory=lambda: [0.0] * 6)
    frequencies_rad_per_s: list[float] = Field(default_factory=lambda: [0.0] * 6)
    phases_rad: list[float] = Field(default_factory=lambda: [0.0] * 6)

    @field_validator("amplitudes_si", "frequencies_rad_per_s", "phases_rad")
    @classmethod
    def _check_six(cls, v: list[float], info) -> list[float]:
        return _six(v, info.field_name)


class SurfaceTermConfig(_Strict):
    coefficient: float = 1.0
    powers: tuple[int, int, int] = (0, 0, 0)
    trig: Literal["none", "sin", "cos"] = "none"
    wave_vector_per_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phase_rad: float = 0.0


class GradientBoundsConfig(_Strict):
    lower: float = Field(default=1e-3, gt=0.0)
    upper: float = Field(default=1e3, gt=0.0)
    hessian_upper: float = Field(default=1e3, gt=0.0)


class PathConfig(_Strict):
    kind: Literal["helix", "ellipse", "surfaces"]
    speed_mps: float = Field(gt=0.0)
    direction: Literal[-1, 1] = 1
    strategy: Literal[-1, 1] = 1
    radius_m: float = Field(default=1.0, gt=0.0)
    omega_rad_per_m: float = Field(default=4.0, gt=0.0)
    s1: list[SurfaceTermConfig] | None = None
    s2: list[SurfaceTermConfig] | None = None
    gradient_bounds: GradientBoundsConfig | None = None
    collinearity_floor: float = Field(default=1e-9, gt=0.0)
    planar_tangent_floor: float = Field(default=1e-9, gt=0.0)

    @model_validator(mode="after")
    def _check_surfaces(self) -> PathConfig:
        if self.kind == "surfaces" and (not self.s1 or not self.s2):
            raise ValueError("kind=surfaces requires non-empty s1 and s2 term lists")
        return self

    def build(self) -> PathSpec:
        return path_from_spec(self.model_dump())


class VfoConfig(_Strict):
    k_p: float = Field(default=2.0, ge=0.0)
    k_theta: float = Field(default=4.0, ge=0.0)
    k_psi: float = Field(default=4.0, ge=0.0)
    k_phi: float = Field(default=5.0, ge=0.0)
    delta_p: float = Field(default=0.75, ge=0.0, lt=1.0)
    delta_o: float = Field(default=1.0, ge=0.0, le=1.0)
    freeze_epsilon: float = Field(default=1e-6, gt=0.0)

    def gains(self) -> VfoGains:
        return VfoGains(
            k_p=self.k_p,
            k_theta=self.k_theta,
            k_psi=self.k_psi,
            k_phi=self.k_phi,
            delta_p=self.delta_p,
            delta_o=self.delta_o,
        )


class AdrConfig(_Strict):
    gain_k_diag: list[float] = Field(default_factory=lambda: [2.4172, 2.4172, 2.4172, 0.5, 0.5, 0.5])
    b_hat_diag: list[float] = Field(default_factory=lambda: [0.3, 0.3, 0.3, 2.5, 0.75, 0.75])
    omega_o_rad_per_s: float | list[float] = 200.0
    inhibition_window_s: float = Field(default=1.0, ge=0.0)

    @field_validator("gain_k_diag")
    @classmethod
    def _check_k(cls, v: list[float]) -> list[float]:
        _six(v, "gain_k_diag")
        if any(x < 0.0 for x in v):
            raise ValueError("gain_k_diag entries must be non-negative")
        return v

    @field_validator("b_hat_diag")
    @classmethod
    def _check_b_hat(cls, v: list[float]) -> list[float]:
        _six(v, "b_hat_diag")
        if any(x <= 0.0 for x in v):
            raise ValueError("b_hat_diag entries must be positive")
        return v

    @field_validator("omega_o_rad_per_s")
    @classmethod
    def _check_omega(cls, v: float | list[float]) -> float | list[float]:
        values = [v] if isinstance(v, (int, float)) else _six(list(v), "omega_o_rad_per_s")
        if any(not (x > 0.0) for x in values):
            raise ValueError("observer bandwidth must be positive")
        return v

    def gains(self) -> AdrGains:
        return AdrGains(K=np.asarray(self.gain_k_diag), B_hat=np.asarray(self.b_hat_diag))

    def bandwidths(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.omega_o_rad_per_s, dtype=float), (6,)).copy()


class LimitsConfig(_Strict):
    enabled: bool = False
    magnitude_si: float = Field(default=8.0, gt=0.0)
    rate_si_per_s: float = Field(default=2.0, gt=0.0)
    # 只在初始过渡段 t < until_s 内缩放；None 表示全程
    until_s: float | None = Field(default=None, gt=0.0)

    def build(self) -> VelocityLimits:
        return VelocityLimits(
            magnitude=self.magnitude_si,
            rate=self.rate_si_per_s,
            enabled=self.enabled,
            until=self.until_s,
        )


class InitialConfig(_Strict):
    # η(0) = [x y z φ θ ψ]
    eta0_si: list[float]
    nu0_si: list[float] = Field(default_factory=lambda: [0.0] * 6)

    @field_validator("eta0_si", "nu0_si")
    @classmethod
    def _check_six(cls, v: list[float], info) -> list[float]:
        return _six(v, info.field_name)

    @field_validator("eta0_si")
    @classmethod
    def _check_attitude(cls, v: list[float]) -> list[float]:
        phi, theta = v[3], v[4]
        if not (-0.5 * math.pi < theta < 0.5 * math.pi):
            raise ValueError(f"initial pitch {theta} outside (-pi/2, pi/2)")
        if not (-math.pi <= phi < math.pi):
            raise ValueError(f"initial roll {phi} outside [-pi, pi)")
        return v


class ScenarioConfig(_Strict):
    scenario_id: str
    description: str = ""
    horizon_s: float = Field(default=100.0, gt=0.0)
    step_s: float = Field(default=1e-3, gt=0.0)
    metric_window_s: tuple[float, float] = (50.0, 100.0)
    singularity_margin: float = Field(default=DEFAULT_SINGULARITY_MARGIN, gt=0.0)

    plant: PlantConfig = Field(default_factory=PlantConfig)
    path: PathConfig
    vfo: VfoConfig = Field(default_factory=VfoConfig)
    adr: AdrConfig = Field(default_factory=AdrConfig)
    limits: LimitsConfig = Field(default_factory=LimitsConfig)
    disturbance: DisturbanceConfig = Field(default_factory=DisturbanceConfig)
    initial: InitialConfig

    @model_validator(mode="after")
    def _check_window(self) -> ScenarioConfig:
        t1, t2 = self.metric_window_s
        if not (0.0 <= t1 < t2 <= self.horizon_s):
            raise ValueError(f"metric window {self.metric_window_s} must satisfy 0 <= t1 < t2 <= horizon_s")
        if self.step_s >= self.horizon_s:
            raise ValueError("step_s must be smaller than horizon_s")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon_s / self.step_s))

    def build_plant(self) -> VehiclePlant:
        if self.disturbance.kind == "sinusoidal":
            disturbance = SinusoidalDisturbance(
                amplitudes=tuple(self.disturbance.amplitudes_si),
                frequencies=tuple(self.disturbance.frequencies_rad_per_s),
                phases=tuple(self.disturbance.phases_rad),
            )
        else:
            disturbance = ZeroDisturbance()
        return VehiclePlant(
            inertia=np.asarray(self.plant.inertia_si),
            linear_damping=np.asarray(self.plant.damping_si),
            actuation=np.asarray(self.plant.actuated, dtype=float),
            include_coriolis=self.plant.include_coriolis,
            external_disturbance=disturbance,
            singularity_margin=self.singularity_margin,
        )

    def build_path(self) -> PathSpec:
        return self.path.build()

    def build_eso_bank(self) -> EsoBank:
        return EsoBank.initial(self.initial.eta0_si, self.adr.bandwidths())

    def canonical_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def with_overrides(config: ScenarioConfig, overrides: dict[str, Any]) -> ScenarioConfig:
    """按点分路径覆盖字段，例如 {"vfo.k_p": 4.0}，并重新校验"""
    data = config.model_dump(mode="json")
    for dotted, value in overrides.items():
        node = data
        keys = dotted.split(".")
        for key in keys[:-1]:
            node = node[key]
        node[keys[-1]] = value
    return ScenarioConfig.model_validate(data)
