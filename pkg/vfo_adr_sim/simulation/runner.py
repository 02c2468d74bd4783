"""
闭环场景执行：固定步长 RK4 积分耦合状态 (η, ν, η_c, x̂)。

每个积分步开始时采样一次控制器（零阶保持）：
frame → ĥ*_p → 辅助姿态及其导数 → ĥ*_o → ν̄_c → 缩放 → p_c → τ（抑制窗口内为零）→ 对象。
控制回路里只记录原始量，d、ε 与偏航/俯仰差在积分结束后按整条轨迹批量计算。
"""

from __future__ import annotations

import time

import numpy as np

from vfo_adr_sim.app_logging import get_logger
from vfo_adr_sim.control.adr import AdrController, eso_derivative_from_input, eso_outputs
from vfo_adr_sim.control.vfo import VfoController
from vfo_adr_sim.dynamics.plant import VehiclePlant
from vfo_adr_sim.dynamics.rigid_body import kinematic_blocks
from vfo_adr_sim.errors import SimulationError
from vfo_adr_sim.paths.builtin import sample_path_points
from vfo_adr_sim.paths.geometry import PathSpec
from vfo_adr_sim.simulation.diagnostics import fill_trace_diagnostics, path_following_error
from vfo_adr_sim.simulation.integrator import rk4_step
from vfo_adr_sim.simulation.schemas import ScenarioConfig
from vfo_adr_sim.simulation.trace import SimulationTrace
from vfo_adr_sim.utils import config_hash, ensure_finite

logger = get_logger(__name__)


def _closed_loop_derivative(
    plant: VehiclePlant,
    adr: AdrController,
    tau: np.ndarray,
    nu_c: np.ndarray,
):
    """τ、ν_c 在一个积分步内保持不变；每次求值只构造一次 (R, T)"""
    margin = plant.singularity_margin
    gamma_tau = plant.actuation @ tau
    # Jᵀ τ_η 即保持的本体系 τ，因此观测器输入为 J B̂ Γ τ
    b_gamma_tau = adr.gains.B_hat @ gamma_tau
    observer_gains = adr.bank.gains
    inertia_inv = plant.inertia_inv
    nu_c_p, nu_c_o = nu_c[:3], nu_c[3:]

    def f(t: float, x: np.ndarray) -> np.ndarray:
        eta = x[0:6]
        nu = x[6:12]
        r_mat, t_mat = kinematic_blocks(eta[3:], margin)
        tau_star_eta = np.asarray(plant.external_disturbance(t), dtype=float)
        tau_star = np.concatenate([r_mat.T @ tau_star_eta[:3], t_mat.T @ tau_star_eta[3:]])
        mu = plant.restoring_and_coriolis(eta, nu)
        u_obs = np.concatenate([r_mat @ b_gamma_tau[:3], t_mat @ b_gamma_tau[3:]])
        x_hat_dot, _ = eso_derivative_from_input(x[18:36], observer_gains, x[12:18], eta, u_obs)

        out = np.empty(36)
        out[0:3] = r_mat @ nu[:3]
        out[3:6] = t_mat @ nu[3:]
        out[6:12] = inertia_inv @ (gamma_tau - mu - tau_star)
        out[12:15] = r_mat @ nu_c_p
        out[15:18] = t_mat @ nu_c_o
        out[18:36] = x_hat_dot
        return out

    return f


def run_scenario(
    config: ScenarioConfig,
    *,
    progress_every: int = 0,
    plant: VehiclePlant | None = None,
    path: PathSpec | None = None,
) -> SimulationTrace:
    """
    确定性：相同配置得到逐位相同的轨迹。

    仿真中的 SimulationError（奇异姿态、非有限状态、路径退化……）不会向外抛出，
    而是记录在 trace.fault 中并保留故障前的数据。

    抑制窗口内外环不使用 ε̂、ε̂̇：此时 τ = 0，观测器正处于峰值阶段。
    """
    plant = plant or config.build_plant()
    path = path or config.build_path()
    margin = plant.singularity_margin
    dt = config.step_s
    n_steps = config.n_steps

    vfo = VfoController(
        path,
        config.vfo.gains(),
        limits=config.limits.build(),
        freeze_epsilon=config.vfo.freeze_epsilon,
    )
    adr = AdrController(
        config.adr.gains(),
        config.build_eso_bank(),
        plant.actuation,
        inhibition_window_s=config.adr.inhibition_window_s,
        singularity_margin=margin,
    )

    eta = np.asarray(config.initial.eta0_si, dtype=float)
    nu = np.asarray(config.initial.nu0_si, dtype=float)
    # η_c(0) = η(0)
    eta_c = eta.copy()
    x_hat = adr.bank.flat
    applied_nu_c = np.zeros(6)

    trace = SimulationTrace.allocate(config.scenario_id, n_steps + 1)
    trace.meta["config_hash"] = config_hash(config.canonical_dict())
    s = trace.series

    logger.info(
        "scenario_started",
        scenario_id=config.scenario_id,
        steps=n_steps,
        dt=dt,
        path=path.name,
    )
    started = time.perf_counter()
    recorded = 0

    try:
        for k in range(n_steps + 1):
            t = k * dt
            x = np.concatenate([eta, nu, eta_c, x_hat])
            ensure_finite("state", x)

            adr.bank.load(x_hat)
            eps_hat, d_hat = eso_outputs(adr.bank)
            tau, tau_eta = adr.control(t, eta)
            r_mat, t_mat = kinematic_blocks(eta[3:], margin)
            b_gamma_tau = adr.gains.B_hat @ plant.actuation @ tau
            u_obs = np.concatenate([r_mat @ b_gamma_tau[:3], t_mat @ b_gamma_tau[3:]])
            _, eps_hat_dot = eso_derivative_from_input(adr.bank.estimates, adr.bank.gains, eta_c, eta, u_obs)

            compensate = not adr.inhibited(t)
            out = vfo.step(eta, eps_hat, eps_hat_dot, applied_nu_c, dt, t=t, compensate=compensate)
            nu_c = out.nu_c
            e, e_2pi = path_following_error(eta, path, out.frame)

            f = _closed_loop_derivative(plant, adr, tau, nu_c)
            k1 = f(t, x)

            trace.t[k] = t
            s["eta"][k] = eta
            s["nu"][k] = nu
            s["nu_dot"][k] = k1[6:12]
            s["eta_c"][k] = eta_c
            s["nu_c"][k] = nu_c
            s["nu_c_raw"][k] = out.nu_c_raw
            s["tau"][k] = tau
            s["gamma_tau"][k] = plant.actuation @ tau
            s["tau_eta"][k] = tau_eta
            s["x_hat"][k] = x_hat
            s["e"][k] = e
            s["e_2pi"][k] = e_2pi
            s["e_a"][k] = out.e_a
            s["d_hat"][k] = d_hat
            s["eps_hat"][k] = eps_hat
            s["h_p"][k] = out.h_p
            s["aux_orientation"][k] = (out.theta_a, out.psi_a)
            s["tangent"][k] = out.frame.tangent
            s["normals"][k, :3] = out.frame.normals[0]
            s["normals"][k, 3:] = out.frame.normals[1]
            s["compensated"][k] = 1.0 if compensate else 0.0
            recorded = k + 1

            if progress_every and k % progress_every == 0:
                logger.debug(
                    "scenario_progress",
                    scenario_id=config.scenario_id,
                    t=round(t, 6),
                    e_p=float(np.hypot(e[0], e[1])),
                )

            if k == n_steps:
                break

            x = rk4_step(f, t, x, dt, k1=k1)
            eta, nu, eta_c, x_hat = x[0:6], x[6:12], x[12:18], x[18:36]
            applied_nu_c = nu_c
    except SimulationError as err:
        trace.fault = {**err.to_dict(), "t": round(recorded * dt, 9)}
        logger.warning(
            "scenario_fault",
            scenario_id=config.scenario_id,
            code=err.code,
            error=err.message,
            t=trace.fault["t"],
        )

    trace.truncate(recorded)
    fill_trace_diagnostics(trace, plant, path, vfo.gains, adr.gains.B_hat, dt)
    elapsed = time.perf_counter() - started
    trace.meta["wall_time_s"] = elapsed
    logger.info(
        "scenario_finished",
        scenario_id=config.scenario_id,
        samples=recorded,
        completed=trace.completed,
        wall_time_s=round(elapsed, 3),
    )
    return trace


def funnel_initial_conditions(
    path: PathSpec,
    n: int,
    radius: float,
    rng: np.random.Generator,
    *,
    candidates: int = 500,
) -> np.ndarray:
    """在路径上随机取点，再在半径 radius 的球内均匀扰动，返回 (n, 3) 初始位置"""
    on_path = sample_path_points(path, candidates)
    idx = rng.integers(0, on_path.shape[0], size=n)
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(n) ** (1.0 / 3.0)
    return on_path[idx] + directions * radii[:, None]
