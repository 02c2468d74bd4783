"""
内置路径（闭式梯度/Hessian）+ 从配置字典构造路径。
"""

from __future__ import annotations

import math
from dataclasses import replace
from functools import partial
from typing import Any, Mapping

import numpy as np

from vfo_adr_sim.errors import ConfigValidationError
from vfo_adr_sim.paths.geometry import GradientBounds, PathSpec, PolynomialTrigSurface, SurfaceTerm


def _helix_samples(n: int, *, radius: float, omega: float, z_range: tuple[float, float]) -> np.ndarray:
    z = np.linspace(z_range[0], z_range[1], n)
    return np.column_stack([radius * np.sin(omega * z), radius * np.cos(omega * z), z])


def _ellipse_samples(n: int) -> np.ndarray:
    # 端点重复，去掉最后一个
    t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    x = np.cos(t)
    y = 2.0 * np.sin(t)
    return np.column_stack([x, y, (1.0 - x - 2.0 * y) / 3.0])


def helix_path(
    u_d: float,
    *,
    radius: float = 1.0,
    omega: float = 4.0,
    direction: int = 1,
    strategy: int = 1,
    z_range: tuple[float, float] = (0.0, 5.0),
) -> PathSpec:
    """s₁ = −x + a·sin(ωz)，s₂ = −y + a·cos(ωz)"""
    s1 = PolynomialTrigSurface(
        terms=(
            SurfaceTerm(coefficient=-1.0, powers=(1, 0, 0)),
            SurfaceTerm(coefficient=radius, trig="sin", wave_vector=(0.0, 0.0, omega)),
        )
    )
    s2 = PolynomialTrigSurface(
        terms=(
            SurfaceTerm(coefficient=-1.0, powers=(0, 1, 0)),
            SurfaceTerm(coefficient=radius, trig="cos", wave_vector=(0.0, 0.0, omega)),
        )
    )
    return PathSpec(
        s1=s1,
        s2=s2,
        direction=direction,
        strategy=strategy,
        speed=u_d,
        name="helix",
        sampler=partial(_helix_samples, radius=radius, omega=omega, z_range=z_range),
    )


def ellipse_path(u_d: float, *, direction: int = 1, strategy: int = 1) -> PathSpec:
    """椭圆柱面 x² + (y/2)² − 1 与平面 x + 2y + 3z − 1 的交线"""
    s1 = PolynomialTrigSurface(
        terms=(
            SurfaceTerm(coefficient=1.0, powers=(2, 0, 0)),
            SurfaceTerm(coefficient=0.25, powers=(0, 2, 0)),
            SurfaceTerm(coefficient=-1.0),
        )
    )
    s2 = PolynomialTrigSurface(
        terms=(
            SurfaceTerm(coefficient=1.0, powers=(1, 0, 0)),
            SurfaceTerm(coefficient=2.0, powers=(0, 1, 0)),
            SurfaceTerm(coefficient=3.0, powers=(0, 0, 1)),
            SurfaceTerm(coefficient=-1.0),
        )
    )
    return PathSpec(
        s1=s1,
        s2=s2,
        direction=direction,
        strategy=strategy,
        speed=u_d,
        name="ellipse",
        sampler=_ellipse_samples,
    )


def _surface_from_terms(terms: Any, key: str) -> PolynomialTrigSurface:
    if not isinstance(terms, (list, tuple)) or not terms:
        raise ConfigValidationError(f"{key} must be a non-empty list of terms", invariant="non-empty level surface", key=key)
    out = []
    for t in terms:
        t = dict(t)
        out.append(
            SurfaceTerm(
                coefficient=t.get("coefficient", 1.0),
                powers=tuple(t.get("powers", (0, 0, 0))),
                trig=t.get("trig", "none"),
                wave_vector=tuple(t.get("wave_vector_per_m", t.get("wave_vector", (0.0, 0.0, 0.0)))),
                phase=t.get("phase_rad", t.get("phase", 0.0)),
            )
        )
    return PolynomialTrigSurface(terms=tuple(out))


def path_from_spec(spec: Mapping[str, Any]) -> PathSpec:
    """
    kind = helix | ellipse | surfaces。

    surfaces 形式：{"kind": "surfaces", "s1": [term...], "s2": [term...]}，
    每个 term 为 {"coefficient", "powers", "trig", "wave_vector_per_m", "phase_rad"}。
    """
    kind = spec.get("kind")
    u_d = float(spec.get("speed_mps", spec.get("speed", 0.1)))
    direction = int(spec.get("direction", 1))
    strategy = int(spec.get("strategy", 1))

    if kind == "helix":
        path = helix_path(
            u_d,
            radius=float(spec.get("radius_m", 1.0)),
            omega=float(spec.get("omega_rad_per_m", 4.0)),
            direction=direction,
            strategy=strategy,
        )
    elif kind == "ellipse":
        path = ellipse_path(u_d, direction=direction, strategy=strategy)
    elif kind == "surfaces":
        path = PathSpec(
            s1=_surface_from_terms(spec.get("s1"), "s1"),
            s2=_surface_from_terms(spec.get("s2"), "s2"),
            direction=direction,
            strategy=strategy,
            speed=u_d,
            name=str(spec.get("name", "surfaces")),
        )
    else:
        raise ConfigValidationError(
            f"unknown path kind {kind!r}", invariant="kind ∈ {helix, ellipse, surfaces}", key="path.kind"
        )

    # 界与下限对所有路径种类都可覆盖
    changes: dict[str, Any] = {}
    bounds = spec.get("gradient_bounds")
    if bounds:
        gb = GradientBounds(
            lower=float(bounds.get("lower", 1e-3)),
            upper=float(bounds.get("upper", 1e3)),
            hessian_upper=float(bounds.get("hessian_upper", 1e3)),
        )
        changes.update(bounds1=gb, bounds2=gb)
    for key in ("collinearity_floor", "planar_tangent_floor"):
        if spec.get(key) is not None:
            changes[key] = float(spec[key])
    return replace(path, **changes) if changes else path


def sample_path_points(path: PathSpec, n: int) -> np.ndarray:
    if path.sampler is None:
        raise ConfigValidationError(f"path {path.name!r} has no on-path sampler", invariant="built-in path", key="path")
    if n <= 0:
        raise ConfigValidationError("sample count must be positive", invariant="n > 0")
    return np.asarray(path.sampler(n), dtype=float)
