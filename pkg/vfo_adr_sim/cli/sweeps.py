"""
参数扫描：kp / delta / omega / ic（初始条件漏斗）。

每个参数点是一次独立仿真，输出目录互相隔离：
<output_root>/<scenario_id>/sweep-<axis>/<label>/
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from vfo_adr_sim.app_logging import configure_logging, get_logger
from vfo_adr_sim.cli.artifacts import execute_run
from vfo_adr_sim.cli.manifest import RunManifest, SweepAxis
from vfo_adr_sim.errors import ConfigValidationError
from vfo_adr_sim.simulation.runner import funnel_initial_conditions
from vfo_adr_sim.simulation.schemas import ScenarioConfig, with_overrides

logger = get_logger(__name__)

SWEEP_AXES = ("kp", "delta", "omega", "ic")

DEFAULT_KP_VALUES = (1.0, 2.0, 4.0)
# (δ_p, δ_o)
DEFAULT_DELTA_PAIRS = ((0.0, 0.0), (0.25, 0.33), (0.5, 0.66), (0.75, 1.0))
DEFAULT_OMEGA_VALUES = (50.0, 100.0, 200.0)

COMPARISON_COLUMNS = (
    "label",
    "overrides",
    "completed",
    "avg_e_p",
    "avg_e_o",
    "avg_abs_e_phi",
    "avg_abs_e_theta_a",
    "avg_abs_e_psi_a",
    "avg_gamma_tau",
    "avg_nu_c",
    "sup_e_p",
    "max_d_hat_norm",
    "max_abs_theta",
)


@dataclass(frozen=True)
class SweepJob:
    label: str
    axis: SweepAxis
    config: ScenarioConfig


def parse_values(raw: str | None) -> list[float] | None:
    if not raw:
        return None
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigValidationError(f"--values must be a comma separated list of numbers: {raw!r}", invariant="numeric values", key="--values") from e


def parse_delta_pairs(raw: str | None) -> list[tuple[float, float]] | None:
    """"0:0,0.25:0.33" → [(0, 0), (0.25, 0.33)]"""
    if not raw:
        return None
    pairs = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            dp, do = item.split(":")
            pairs.append((float(dp), float(do)))
        except ValueError as e:
            raise ConfigValidationError(f"delta values must look like 'dp:do', got {item!r}", invariant="delta_p:delta_o pairs", key="--values") from e
    return pairs


def _job(config: ScenarioConfig, axis: str, label: str, overrides: dict) -> SweepJob:
    try:
        updated = with_overrides(config, overrides)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigValidationError(f"sweep point {label}: {first.get('msg', '')}", invariant=str(first.get("msg", "")), key=key) from e
    return SweepJob(label=label, axis=SweepAxis(axis=axis, label=label, overrides=overrides), config=updated)


def build_sweep_jobs(
    config: ScenarioConfig,
    axis: str,
    *,
    values: str | None = None,
    count: int = 20,
    radius: float = 0.5,
    seed: int = 0,
) -> list[SweepJob]:
    if axis == "kp":
        return [
            _job(config, axis, f"kp-{v:g}", {"vfo.k_p": v})
            for v in (parse_values(values) or DEFAULT_KP_VALUES)
        ]
    if axis == "delta":
        return [
            _job(config, axis, f"delta-{dp:g}-{do:g}", {"vfo.delta_p": dp, "vfo.delta_o": do})
            for dp, do in (parse_delta_pairs(values) or DEFAULT_DELTA_PAIRS)
        ]
    if axis == "omega":
        return [
            _job(config, axis, f"omega-{v:g}", {"adr.omega_o_rad_per_s": v})
            for v in (parse_values(values) or DEFAULT_OMEGA_VALUES)
        ]
    if axis == "ic":
        if count <= 0 or radius <= 0.0:
            raise ConfigValidationError("ic sweep needs count > 0 and radius > 0", invariant="count > 0, radius > 0", key="--count/--radius")
        rng = np.random.default_rng(seed)
        positions = funnel_initial_conditions(config.build_path(), count, radius, rng)
        attitude = list(config.initial.eta0_si[3:])
        return [
            _job(config, axis, f"ic-{i:03d}", {"initial.eta0_si": [float(v) for v in p] + attitude})
            for i, p in enumerate(positions)
        ]
    raise ConfigValidationError(f"unknown sweep axis {axis!r}", invariant=f"axis in {SWEEP_AXES}", key="axis")


def _init_worker(log_level: str, log_format: str) -> None:
    configure_logging(log_level, log_format)


def _run_job(job: SweepJob, sweep_dir: str, decimation: int, progress_every: int) -> RunManifest:
    return execute_run(
        job.config,
        Path(sweep_dir) / job.label,
        run_id=job.label,
        sweep=job.axis,
        decimation=decimation,
        progress_every=progress_every,
    )


def run_sweep(
    jobs: list[SweepJob],
    sweep_dir: Path,
    *,
    max_workers: int = 1,
    decimation: int = 1,
    progress_every: int = 0,
    log_level: str = "INFO",
    log_format: str = "console",
) -> list[RunManifest]:
    """结果顺序与 jobs 一致；max_workers <= 1 时在当前进程内串行执行"""
    sweep_dir.mkdir(parents=True, exist_ok=True)
    logger.info("sweep_started", runs=len(jobs), max_workers=max_workers, sweep_dir=str(sweep_dir))

    if max_workers <= 1 or len(jobs) <= 1:
        manifests = [_run_job(job, str(sweep_dir), decimation, progress_every) for job in jobs]
    else:
        with ProcessPoolExecutor(
            max_workers=min(max_workers, len(jobs)),
            initializer=_init_worker,
            initargs=(log_level, log_format),
        ) as pool:
            futures = [pool.submit(_run_job, job, str(sweep_dir), decimation, progress_every) for job in jobs]
            manifests = [f.result() for f in futures]

    logger.info(
        "sweep_finished",
        runs=len(manifests),
        faulted=sum(1 for m in manifests if not m.completed),
    )
    return manifests


def comparison_rows(manifests: list[RunManifest]) -> list[list[object]]:
    rows = []
    for m in manifests:
        metrics = m.metrics
        label = m.sweep.label if m.sweep else m.run_id
        overrides = json.dumps(m.sweep.overrides if m.sweep else {}, sort_keys=True)
        if metrics is None:
            rows.append([label, overrides, m.completed] + [float("nan")] * (len(COMPARISON_COLUMNS) - 3))
            continue
        rows.append(
            [
                label,
                overrides,
                m.completed,
                metrics.avg_e_p,
                metrics.avg_e_o,
                metrics.avg_abs_e_phi,
                metrics.avg_abs_e_theta_a,
                metrics.avg_abs_e_psi_a,
                metrics.avg_gamma_tau,
                metrics.avg_nu_c,
                metrics.sup_e_p,
                metrics.max_d_hat_norm,
                metrics.max_abs_theta,
            ]
        )
    return rows


def format_comparison(manifests: list[RunManifest]) -> str:
    header = (
        f"{'run':<22} {'done':<5} {'|e_p|avg':>10} {'|e_o|avg':>10} {'|e_phi|':>10} {'|e_tha|':>10} "
        f"{'|e_psia|':>10} {'|Gt|avg':>10} {'|nu_c|avg':>10} {'sup|e_p|':>10}"
    )
    lines = [header, "-" * len(header)]
    for row in comparison_rows(manifests):
        label, _, completed, *values = row[:11]
        lines.append(f"{label:<22} {('yes' if completed else 'no'):<5} " + " ".join(f"{v:>10.4f}" for v in values))
    return "\n".join(lines) + "\n"


def write_comparison(manifests: list[RunManifest], sweep_dir: Path) -> dict[str, str]:
    csv_path = sweep_dir / "comparison.csv"
    txt_path = sweep_dir / "comparison.txt"
    with csv_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(COMPARISON_COLUMNS)
        for row in comparison_rows(manifests):
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    txt_path.write_text(format_comparison(manifests), encoding="utf-8")
    return {"comparison_csv": str(csv_path), "comparison_txt": str(txt_path)}
