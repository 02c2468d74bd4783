"""
单次运行的产物：trace.csv / path.csv / metrics.json / metrics.txt / plot.py / manifest.json。

同一配置重复运行会覆盖同一目录下的文件，内容逐位一致（manifest 中的阶段耗时除外）。
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from vfo_adr_sim.app_logging import Tracer, bind_context, clear_context, get_logger
from vfo_adr_sim.cli.manifest import RunManifest, SweepAxis
from vfo_adr_sim.errors import ConfigValidationError, EmptyWindow
from vfo_adr_sim.paths.builtin import sample_path_points
from vfo_adr_sim.simulation.metrics import Metrics, compute_metrics, format_metrics
from vfo_adr_sim.simulation.runner import run_scenario
from vfo_adr_sim.simulation.schemas import ScenarioConfig
from vfo_adr_sim.simulation.trace import CSV_COLUMNS, SimulationTrace
from vfo_adr_sim.utils import config_hash

logger = get_logger(__name__)

PATH_SAMPLES = 2000

PLOT_SCRIPT = '''\
"""
由 vfo-adr-sim 生成：python plot.py [--save]

面板：三维路径、跟踪误差、指令速度、执行力、总扰动 |d| 与估计 |d_hat|。
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
data = np.genfromtxt(here / "trace.csv", delimiter=",", names=True)
t = data["t"]

fig = plt.figure(figsize=(14, 9))

ax = fig.add_subplot(2, 3, 1, projection="3d")
ax.plot(data["x"], data["y"], data["z"], label="vehicle")
path_file = here / "path.csv"
if path_file.exists():
    ref = np.genfromtxt(path_file, delimiter=",", names=True)
    ax.plot(ref["x"], ref["y"], ref["z"], "k--", linewidth=0.8, label="path")
ax.set_xlabel("x [m]")
ax.set_ylabel("y [m]")
ax.set_zlabel("z [m]")
ax.legend()

ax = fig.add_subplot(2, 3, 2)
for name in ("s1", "s2"):
    ax.plot(t, data[name], label=name)
ax.set_title("path-following error (position)")
ax.set_xlabel("t [s]")
ax.legend()

ax = fig.add_subplot(2, 3, 3)
for name in ("e_phi", "e_theta", "e_psi_2pi", "e_theta_a", "e_psi_a"):
    ax.plot(t, data[name], label=name)
ax.set_title("orientation errors [rad]")
ax.set_xlabel("t [s]")
ax.legend()

ax = fig.add_subplot(2, 3, 4)
for name in ("u_c", "p_c", "q_c", "r_c"):
    ax.plot(t, data[name], label=name)
ax.set_title("commanded velocities")
ax.set_xlabel("t [s]")
ax.legend()

ax = fig.add_subplot(2, 3, 5)
for name in ("tau_u", "tau_p", "tau_q", "tau_r"):
    ax.plot(t, data[name], label=name)
ax.set_title("applied forces / torques")
ax.set_xlabel("t [s]")
ax.legend()

ax = fig.add_subplot(2, 3, 6)
ax.plot(t, data["d_norm"], label="|d|")
ax.plot(t, data["dhat_norm"], "--", label="|d_hat|")
ax.set_title("total disturbance")
ax.set_xlabel("t [s]")
ax.legend()

fig.tight_layout()
if "--save" in sys.argv:
    fig.savefig(here / "plot.png", dpi=150)
else:
    plt.show()
'''


def write_trace_csv(trace: SimulationTrace, path: Path, decimation: int = 1) -> int:
    """float 走 repr，保证往返精度；返回写出的数据行数"""
    rows = 0
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for row in trace.to_rows(decimation):
            writer.writerow([repr(v) for v in row])
            rows += 1
    return rows


def write_path_csv(points: np.ndarray, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(("x", "y", "z"))
        for p in points:
            writer.writerow([repr(float(v)) for v in p])


def write_metrics(metrics: Metrics, run_dir: Path) -> dict[str, str]:
    json_path = run_dir / "metrics.json"
    txt_path = run_dir / "metrics.txt"
    json_path.write_text(metrics.model_dump_json(indent=2) + "\n", encoding="utf-8")
    txt_path.write_text(format_metrics(metrics), encoding="utf-8")
    return {"metrics_json": str(json_path), "metrics_txt": str(txt_path)}


def write_plot_script(run_dir: Path) -> Path:
    path = run_dir / "plot.py"
    path.write_text(PLOT_SCRIPT, encoding="utf-8")
    return path


def execute_run(
    config: ScenarioConfig,
    run_dir: Path,
    *,
    run_id: str = "base",
    sweep: SweepAxis | None = None,
    decimation: int = 1,
    progress_every: int = 0,
) -> RunManifest:
    """仿真 → 指标 → 导出，返回写入 manifest.json 的同一份 RunManifest"""
    run_dir.mkdir(parents=True, exist_ok=True)
    tracer = Tracer(config.scenario_id, run_id)
    bind_context(scenario_id=config.scenario_id, run_id=run_id)
    try:
        with tracer.stage("simulate") as out:
            trace = run_scenario(config, progress_every=progress_every)
            out.update(samples=len(trace), completed=trace.completed)

        metrics: Metrics | None = None
        with tracer.stage("metrics") as out:
            try:
                metrics = compute_metrics(trace, config.metric_window_s)
            except EmptyWindow as e:
                # 故障发生在指标窗口之前
                logger.warning("metrics_unavailable", error=e.message)
            out["available"] = metrics is not None

        outputs: dict[str, str] = {}
        with tracer.stage("export") as out:
            csv_path = run_dir / "trace.csv"
            rows = write_trace_csv(trace, csv_path, decimation)
            outputs["trace_csv"] = str(csv_path)
            try:
                points = sample_path_points(config.build_path(), PATH_SAMPLES)
            except ConfigValidationError:
                points = None
            if points is not None:
                write_path_csv(points, run_dir / "path.csv")
                outputs["path_csv"] = str(run_dir / "path.csv")
            if metrics is not None:
                outputs.update(write_metrics(metrics, run_dir))
            outputs["plot_script"] = str(write_plot_script(run_dir))
            out["csv_rows"] = rows

        manifest = RunManifest(
            scenario_id=config.scenario_id,
            run_id=run_id,
            config_hash=config_hash(config.canonical_dict()),
            completed=trace.completed,
            fault=trace.fault,
            sweep=sweep,
            outputs=outputs,
            metrics=metrics,
            timing=tracer.to_dict(),
        )
        manifest_path = run_dir / "manifest.json"
        manifest.outputs["manifest"] = str(manifest_path)
        manifest_path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(
            "run_exported",
            run_dir=str(run_dir),
            completed=manifest.completed,
            avg_e_p=None if metrics is None else round(metrics.avg_e_p, 6),
        )
        return manifest
    finally:
        clear_context()
