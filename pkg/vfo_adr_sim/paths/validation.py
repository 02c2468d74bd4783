from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np
from numpy.typing import ArrayLike

from vfo_adr_sim.app_logging import get_logger
from vfo_adr_sim.paths.geometry import PathSpec, evaluate_surface, hessian_norm

logger = get_logger(__name__)


@dataclass
class PathValidationReport:
    samples: int = 0
    min_gradient_norm: tuple[float, float] = (float("inf"), float("inf"))
    max_gradient_norm: tuple[float, float] = (0.0, 0.0)
    max_hessian_norm: tuple[float, float] = (0.0, 0.0)
    min_cross_norm: float = float("inf")
    min_planar_tangent_norm: float = float("inf")
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "min_gradient_norm": list(self.min_gradient_norm),
            "max_gradient_norm": list(self.max_gradient_norm),
            "max_hessian_norm": list(self.max_hessian_norm),
            "min_cross_norm": self.min_cross_norm,
            "min_planar_tangent_norm": self.min_planar_tangent_norm,
            "violations": list(self.violations),
            "ok": self.ok,
        }


def validate_path(path: PathSpec, sample_positions: Iterable[ArrayLike]) -> PathValidationReport:
    """只做统计与标记，不抛异常"""
    report = PathValidationReport()
    min_g = [float("inf"), float("inf")]
    max_g = [0.0, 0.0]
    max_h = [0.0, 0.0]
    flagged: set[str] = set()

    def _flag(kind: str, message: str) -> None:
        # 同类问题只记录第一次出现的位置
        if kind not in flagged:
            flagged.add(kind)
            report.violations.append(message)

    for raw in sample_positions:
        p = np.asarray(raw, dtype=float).reshape(3)
        report.samples += 1
        grads = []
        for idx, (surface, bounds) in enumerate(((path.s1, path.bounds1), (path.s2, path.bounds2))):
            _, g, h = evaluate_surface(surface, p)
            g_norm = float(np.linalg.norm(g))
            h_norm = hessian_norm(h)
            min_g[idx] = min(min_g[idx], g_norm)
            max_g[idx] = max(max_g[idx], g_norm)
            max_h[idx] = max(max_h[idx], h_norm)
            if not (bounds.lower < g_norm < bounds.upper):
                _flag(f"gradient{idx + 1}", f"degenerate_gradient: |grad s{idx + 1}| = {g_norm:.3e} at {p.tolist()}")
            if h_norm >= bounds.hessian_upper:
                _flag(f"hessian{idx + 1}", f"hessian_bound: |hess s{idx + 1}| = {h_norm:.3e} at {p.tolist()}")
            grads.append(g)

        w = np.cross(grads[0], grads[1])
        w_norm = float(np.linalg.norm(w))
        report.min_cross_norm = min(report.min_cross_norm, w_norm)
        if w_norm <= path.collinearity_floor:
            _flag("collinear", f"collinear_gradients: |grad s1 x grad s2| = {w_norm:.3e} at {p.tolist()}")
            planar = 0.0
        else:
            planar = float(np.linalg.norm(w[:2])) / w_norm
        report.min_planar_tangent_norm = min(report.min_planar_tangent_norm, planar)
        if planar <= path.planar_tangent_floor:
            _flag("planar", f"planar_tangent_degenerate: |tangent_xy| = {planar:.3e} at {p.tolist()}")

    report.min_gradient_norm = (min_g[0], min_g[1])
    report.max_gradient_norm = (max_g[0], max_g[1])
    report.max_hessian_norm = (max_h[0], max_h[1])

    logger.info(
        "path_validated",
        path=path.name,
        samples=report.samples,
        violations=len(report.violations),
    )
    return report
