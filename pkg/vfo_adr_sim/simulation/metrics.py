"""
窗口统计：α_avg = (1/(t₂−t₁))∫α dt（梯形积分）与窗口内上确界。
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel
from scipy.integrate import trapezoid

from vfo_adr_sim.errors import EmptyWindow
from vfo_adr_sim.simulation.trace import SimulationTrace


class Metrics(BaseModel):
    window_s: tuple[float, float]
    samples: int

    sup_e_p: float
    sup_e_2pi: float

    avg_e_p: float
    avg_e_o: float
    avg_abs_e_phi: float
    avg_abs_e_theta_a: float
    avg_abs_e_psi_a: float
    avg_nu_c: float
    avg_gamma_tau: float
    avg_d_norm: float
    avg_d_error: float

    # 全程最大值（包含瞬态）
    max_commanded_velocity: float
    max_applied_force: float
    max_d_hat_norm: float
    max_abs_theta: float

    yaw_bound_violations: int
    completed: bool
    fault_code: str | None = None


def window_average(t: np.ndarray, values: np.ndarray) -> float:
    if t.shape[0] == 1:
        return float(values[0])
    return float(trapezoid(values, t) / (t[-1] - t[0]))


def compute_metrics(trace: SimulationTrace, window: tuple[float, float]) -> Metrics:
    t1, t2 = window
    t = trace.t
    # 半步容差，端点计入窗口
    tol = 0.5 * float(np.min(np.diff(t))) if len(t) > 1 else 0.0
    mask = (t >= t1 - tol) & (t <= t2 + tol)
    if not np.any(mask):
        raise EmptyWindow(f"no samples in window [{t1}, {t2}]", window=[t1, t2], trace_end=float(t[-1]) if len(t) else None)

    s = trace.series
    tw = t[mask]
    e_p = trace.e_p_norm()
    e_2pi = trace.e_2pi_norm()
    e_o = np.linalg.norm(s["e_2pi"][:, 2:], axis=1)
    nu_c = s["nu_c"]
    gamma_tau = s["gamma_tau"]
    d_norm = np.linalg.norm(s["d"], axis=1)
    d_err = np.linalg.norm(s["d"] - s["d_hat"], axis=1)
    actuated = [0, 3, 4, 5]

    def avg(values: np.ndarray) -> float:
        return window_average(tw, values[mask])

    violations = int(np.count_nonzero(np.abs(s["eps_psi"]) > s["f_eps_psi"] + 1e-9))

    return Metrics(
        window_s=(float(t1), float(t2)),
        samples=int(np.count_nonzero(mask)),
        sup_e_p=float(np.max(e_p[mask])),
        sup_e_2pi=float(np.max(e_2pi[mask])),
        avg_e_p=avg(e_p),
        avg_e_o=avg(e_o),
        avg_abs_e_phi=avg(np.abs(s["e_2pi"][:, 2])),
        avg_abs_e_theta_a=avg(np.abs(s["e_a"][:, 0])),
        avg_abs_e_psi_a=avg(np.abs(s["e_a"][:, 1])),
        avg_nu_c=avg(np.linalg.norm(nu_c, axis=1)),
        avg_gamma_tau=avg(np.linalg.norm(gamma_tau, axis=1)),
        avg_d_norm=avg(d_norm),
        avg_d_error=avg(d_err),
        max_commanded_velocity=float(np.max(np.abs(nu_c[:, actuated]))),
        max_applied_force=float(np.max(np.abs(gamma_tau[:, actuated]))),
        max_d_hat_norm=float(np.max(np.linalg.norm(s["d_hat"], axis=1))),
        max_abs_theta=float(np.max(np.abs(s["eta"][:, 4]))),
        yaw_bound_violations=violations,
        completed=trace.completed,
        fault_code=None if trace.fault is None else str(trace.fault.get("code")),
    )


def format_metrics(metrics: Metrics) -> str:
    """人类可读的摘要（metrics.txt）"""
    t1, t2 = metrics.window_s
    lines = [
        f"window              [{t1:g}, {t2:g}] s  ({metrics.samples} samples)",
        f"completed           {metrics.completed}" + (f"  fault={metrics.fault_code}" if metrics.fault_code else ""),
        f"sup |e_p|           {metrics.sup_e_p:.4f}",
        f"sup |e_2pi|         {metrics.sup_e_2pi:.4f}",
        f"avg |e_p|           {metrics.avg_e_p:.4f}",
        f"avg |e_o|           {metrics.avg_e_o:.4f}",
        f"avg |e_phi|         {metrics.avg_abs_e_phi:.4f}",
        f"avg |e_theta_a|     {metrics.avg_abs_e_theta_a:.4f}",
        f"avg |e_psi_a|       {metrics.avg_abs_e_psi_a:.4f}",
        f"avg |nu_c|          {metrics.avg_nu_c:.4f}",
        f"avg |Gamma tau|     {metrics.avg_gamma_tau:.4f}",
        f"avg |d|             {metrics.avg_d_norm:.4f}",
        f"avg |d - d_hat|     {metrics.avg_d_error:.4f}",
        f"max commanded vel   {metrics.max_commanded_velocity:.4g}",
        f"max applied force   {metrics.max_applied_force:.4g}",
        f"max |d_hat|         {metrics.max_d_hat_norm:.4g}",
        f"max |theta|         {metrics.max_abs_theta:.4f}",
        f"yaw bound misses    {metrics.yaw_bound_violations}",
    ]
    return "\n".join(lines) + "\n"
