"""
非参数化路径：两个水平面 s₁(η_p)=0、s₂(η_p)=0 的交线。

所有控制回路里用到的梯度/Hessian 都是解析式；FiniteDifferenceSurface 仅用于测试对照。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.errors import (
    CollinearGradients,
    ConfigValidationError,
    DegenerateGradient,
    PlanarTangentDegenerate,
    UnboundedHessian,
)
from vfo_adr_sim.utils import atan2_left

TrigKind = Literal["none", "sin", "cos"]


@runtime_checkable
class LevelSurface(Protocol):
    def value(self, p: np.ndarray) -> float: ...

    def gradient(self, p: np.ndarray) -> np.ndarray: ...

    def hessian(self, p: np.ndarray) -> np.ndarray: ...


def _power_derivative(x: float, n: int, k: int) -> float:
    """d^k/dx^k x^n"""
    if k > n:
        return 0.0
    coef = 1.0
    for i in range(k):
        coef *= n - i
    return coef * x ** (n - k)


def _monomial(p: np.ndarray, powers: tuple[int, int, int]) -> tuple[float, np.ndarray, np.ndarray]:
    """x^a y^b z^c 及其梯度、Hessian"""
    x, y, z = float(p[0]), float(p[1]), float(p[2])
    a, b, c = powers
    x0, x1, x2 = (_power_derivative(x, a, k) for k in range(3))
    y0, y1, y2 = (_power_derivative(y, b, k) for k in range(3))
    z0, z1, z2 = (_power_derivative(z, c, k) for k in range(3))

    value = x0 * y0 * z0
    grad = np.array([x1 * y0 * z0, x0 * y1 * z0, x0 * y0 * z1])
    hxy = x1 * y1 * z0
    hxz = x1 * y0 * z1
    hyz = x0 * y1 * z1
    hess = np.array(
        [
            [x2 * y0 * z0, hxy, hxz],
            [hxy, x0 * y2 * z0, hyz],
            [hxz, hyz, x0 * y0 * z2],
        ]
    )
    return value, grad, hess


def hessian_norm(hess: np.ndarray) -> float:
    """谱范数 ‖∇²s‖₂"""
    return float(np.linalg.norm(hess, 2))


@dataclass(frozen=True)
class SurfaceTerm:
    """coefficient · x^a y^b z^c · g(k·p + phase)，g ∈ {1, sin, cos}"""

    coefficient: float
    powers: tuple[int, int, int] = (0, 0, 0)
    trig: TrigKind = "none"
    wave_vector: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phase: float = 0.0

    def __post_init__(self) -> None:
        powers = tuple(int(v) for v in self.powers)
        if len(powers) != 3 or any(v < 0 for v in powers):
            raise ConfigValidationError("powers must be 3 non-negative integers", invariant="monomial powers ≥ 0")
        wave = tuple(float(v) for v in self.wave_vector)
        if len(wave) != 3:
            raise ConfigValidationError("wave_vector must have 3 entries", invariant="k ∈ ℝ³")
        if self.trig not in ("none", "sin", "cos"):
            raise ConfigValidationError(f"unknown trig kind {self.trig!r}", invariant="trig ∈ {none, sin, cos}")
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "wave_vector", wave)
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "phase", float(self.phase))

    def _trig(self, p: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        if self.trig == "none":
            return 1.0, np.zeros(3), np.zeros((3, 3))
        k = np.asarray(self.wave_vector)
        arg = float(k @ p) + self.phase
        s, c = math.sin(arg), math.cos(arg)
        if self.trig == "sin":
            g, dg, ddg = s, c, -s
        else:
            g, dg, ddg = c, -s, -c
        return g, dg * k, ddg * np.outer(k, k)

    def evaluate(self, p: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        if self.trig == "none":
            m, dm, hm = _monomial(p, self.powers)
            return self.coefficient * m, self.coefficient * dm, self.coefficient * hm
        m, dm, hm = _monomial(p, self.powers)
        f, df, hf = self._trig(p)
        c = self.coefficient
        value = c * m * f
        grad = c * (f * dm + m * df)
        hess = c * (f * hm + np.outer(dm, df) + np.outer(df, dm) + m * hf)
        return value, grad, hess


@dataclass(frozen=True)
class PolynomialTrigSurface:
    """s(p) = Σ 项，每一项是单项式与（可选）正弦/余弦的乘积"""

    terms: tuple[SurfaceTerm, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ConfigValidationError("surface needs at least one term", invariant="non-empty level surface")
        object.__setattr__(self, "terms", terms)

    def evaluate(self, p: ArrayLike) -> tuple[float, np.ndarray, np.ndarray]:
        pos = np.asarray(p, dtype=float).reshape(3)
        value = 0.0
        grad = np.zeros(3)
        hess = np.zeros((3, 3))
        for term in self.terms:
            v, g, h = term.evaluate(pos)
            value += v
            grad += g
            hess += h
        return value, grad, hess

    def value(self, p: ArrayLike) -> float:
        return self.evaluate(p)[0]

    def gradient(self, p: ArrayLike) -> np.ndarray:
        return self.evaluate(p)[1]

    def hessian(self, p: ArrayLike) -> np.ndarray:
        return self.evaluate(p)[2]


@dataclass(frozen=True)
class FiniteDifferenceSurface:
    """用中心差分包装任意标量函数，只用于测试"""

    func: Callable[[np.ndarray], float]
    step: float = 1e-5

    def value(self, p: ArrayLike) -> float:
        return float(self.func(np.asarray(p, dtype=float)))

    def gradient(self, p: ArrayLike) -> np.ndarray:
        pos = np.asarray(p, dtype=float)
        h = self.step
        out = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            out[i] = (self.func(pos + e) - self.func(pos - e)) / (2.0 * h)
        return out

    def hessian(self, p: ArrayLike) -> np.ndarray:
        pos = np.asarray(p, dtype=float)
        h = self.step
        out = np.empty((3, 3))
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            out[:, i] = (self.gradient(pos + e) - self.gradient(pos - e)) / (2.0 * h)
        return 0.5 * (out + out.T)


def evaluate_surface(surface: LevelSurface, p: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    if isinstance(surface, PolynomialTrigSurface):
        return surface.evaluate(p)
    return surface.value(p), np.asarray(surface.gradient(p), dtype=float), np.asarray(surface.hessian(p), dtype=float)


@dataclass(frozen=True)
class GradientBounds:
    """m̲_j < ‖∇s_j‖ < m̄_j，‖Hess_j‖ < M̄_j"""

    lower: float = 1e-3
    upper: float = 1e3
    hessian_upper: float = 1e3

    def __post_init__(self) -> None:
        if not (0.0 < self.lower < self.upper):
            raise ConfigValidationError("gradient bounds must satisfy 0 < lower < upper", invariant="0 < m̲ < m̄")
        if self.hessian_upper <= 0.0:
            raise ConfigValidationError("hessian bound must be positive", invariant="M̄ > 0")


@dataclass(frozen=True)
class PathSpec:
    s1: LevelSurface
    s2: LevelSurface
    # σ：沿路径运动方向
    direction: int = 1
    # ξ_d：前进 (+1) / 后退 (−1) 策略
    strategy: int = 1
    speed: float = 0.1
    bounds1: GradientBounds = field(default_factory=GradientBounds)
    bounds2: GradientBounds = field(default_factory=GradientBounds)
    # ‖∇s₁ × ∇s₂‖ 与 ‖ϑ̄_⊥‖ 的下限
    collinearity_floor: float = 1e-9
    planar_tangent_floor: float = 1e-9
    name: str = "custom"
    # 仅内置路径提供：n -> (n, 3) 的路径上采样点，用于校验与测试，不进入控制回路
    sampler: Callable[[int], np.ndarray] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.direction not in (-1, 1):
            raise ConfigValidationError("direction must be ±1", invariant="σ ∈ {−1, +1}", key="direction")
        if self.strategy not in (-1, 1):
            raise ConfigValidationError("strategy must be ±1", invariant="ξ_d ∈ {−1, +1}", key="strategy")
        if not (self.speed > 0.0 and math.isfinite(self.speed)):
            raise ConfigValidationError("desired speed must be positive", invariant="u_d > 0", key="speed")
        for name in ("collinearity_floor", "planar_tangent_floor"):
            if not getattr(self, name) > 0.0:
                raise ConfigValidationError(f"{name} must be positive", invariant=f"{name} > 0", key=name)


@dataclass(frozen=True)
class PathFrame:
    s_values: tuple[float, float]
    gradients: tuple[np.ndarray, np.ndarray]
    hessians: tuple[np.ndarray, np.ndarray]
    gradient_norms: tuple[float, float]
    normals: tuple[np.ndarray, np.ndarray]
    # w_⊥ = ∇s₁ × ∇s₂（未归一化）
    cross: np.ndarray
    tangent: np.ndarray
    planar_tangent: np.ndarray

    @property
    def cross_norm(self) -> float:
        return float(np.linalg.norm(self.cross))


@dataclass(frozen=True)
class FrameRates:
    s_dot: tuple[float, float]
    normals_dot: tuple[np.ndarray, np.ndarray]
    tangent_dot: np.ndarray


def evaluate_frame(path: PathSpec, position: ArrayLike) -> PathFrame:
    p = np.asarray(position, dtype=float).reshape(3)
    s1, g1, h1 = evaluate_surface(path.s1, p)
    s2, g2, h2 = evaluate_surface(path.s2, p)

    norms = []
    for idx, (grad, hess, bounds) in enumerate(((g1, h1, path.bounds1), (g2, h2, path.bounds2)), start=1):
        n = float(np.linalg.norm(grad))
        if not (bounds.lower < n < bounds.upper):
            raise DegenerateGradient(
                f"|grad s{idx}| = {n:.3e} outside ({bounds.lower:g}, {bounds.upper:g})",
                surface=idx,
                norm=n,
                position=p.tolist(),
            )
        # Frobenius 范数不小于谱范数，低于上界时不必做 SVD
        if float(np.linalg.norm(hess)) >= bounds.hessian_upper:
            h_norm = hessian_norm(hess)
            if h_norm >= bounds.hessian_upper:
                raise UnboundedHessian(
                    f"|hess s{idx}| = {h_norm:.3e} not below {bounds.hessian_upper:g}",
                    surface=idx,
                    norm=h_norm,
                    position=p.tolist(),
                )
        norms.append(n)

    w = np.cross(g1, g2)
    w_norm = float(np.linalg.norm(w))
    if w_norm <= path.collinearity_floor:
        raise CollinearGradients(
            f"|grad s1 x grad s2| = {w_norm:.3e} below floor",
            cross_norm=w_norm,
            position=p.tolist(),
        )

    tangent = path.direction * w / w_norm
    return PathFrame(
        s_values=(float(s1), float(s2)),
        gradients=(g1, g2),
        hessians=(h1, h2),
        gradient_norms=(norms[0], norms[1]),
        normals=(-g1 / norms[0], -g2 / norms[1]),
        cross=w,
        tangent=tangent,
        planar_tangent=tangent[:2].copy(),
    )


def desired_orientation(path: PathSpec, frame: PathFrame) -> tuple[float, float, float]:
    """(ψ_d, θ_d, φ_d)；非倾斜运动，φ_d ≡ 0"""
    vx, vy, vz = frame.tangent
    if float(np.linalg.norm(frame.planar_tangent)) <= path.planar_tangent_floor:
        raise PlanarTangentDegenerate("planar tangent vanishes, desired yaw undefined", tangent=frame.tangent.tolist())
    xi = path.strategy
    psi_d = atan2_left(xi * vy, xi * vx)
    beta1 = vx * math.cos(psi_d) + vy * math.sin(psi_d)
    theta_d = math.atan(-vz / beta1)
    return psi_d, theta_d, 0.0


def frame_time_derivatives(path: PathSpec, position: ArrayLike, position_rate: ArrayLike, frame: PathFrame | None = None) -> FrameRates:
    """
    沿给定的 η̇_p 计算 ṡ_j、ϑ̇_j、ϑ̇_⊥。

    名义量与输出反馈（带 ^）量只差在调用方传入的 η̇_p 上：η̇_pc − ε_p 或 η̇_pc − ε̂_p。
    """
    if frame is None:
        frame = evaluate_frame(path, position)
    rate = np.asarray(position_rate, dtype=float).reshape(3)

    s_dot = []
    normals_dot = []
    grads_dot = []
    for grad, hess, norm in zip(frame.gradients, frame.hessians, frame.gradient_norms):
        s_dot.append(float(grad @ rate))
        d_grad = hess @ rate
        d_norm = float(grad @ d_grad) / norm
        # ϑ_j = −∇s_j/‖∇s_j‖
        normals_dot.append((-d_grad * norm + grad * d_norm) / (norm * norm))
        grads_dot.append(d_grad)

    g1, g2 = frame.gradients
    w = frame.cross
    w_dot = np.cross(grads_dot[0], g2) + np.cross(g1, grads_dot[1])
    w_norm = frame.cross_norm
    tangent_dot = path.direction * (w_dot * float(w @ w) - w * float(w @ w_dot)) / w_norm**3

    return FrameRates(
        s_dot=(s_dot[0], s_dot[1]),
        normals_dot=(normals_dot[0], normals_dot[1]),
        tangent_dot=tangent_dot,
    )
