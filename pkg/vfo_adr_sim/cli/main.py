"""
命令行入口：python -m vfo_adr_sim <verb> ...

  run <config>                              单次仿真并导出
  sweep kp|delta|omega|ic <config>          参数扫描 + comparison 表
  validate-path <config>                    检查路径梯度 / Hessian / 共线性条件
  selftest                                  运行快速性质测试（pytest -m "not slow"）
  scenarios                                 列出内置场景

退出码：0 正常完成；1 仿真故障或路径检查不通过；2 配置错误。
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from vfo_adr_sim.app_logging import configure_logging, get_logger
from vfo_adr_sim.cli.artifacts import execute_run
from vfo_adr_sim.cli.sweeps import SWEEP_AXES, build_sweep_jobs, run_sweep, write_comparison
from vfo_adr_sim.config import get_settings
from vfo_adr_sim.errors import ConfigParseError, ConfigValidationError, SimulationError
from vfo_adr_sim.paths.builtin import sample_path_points
from vfo_adr_sim.paths.validation import validate_path
from vfo_adr_sim.scenarios import list_bundled_scenarios, parse_config

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    ap = argparse.ArgumentParser(prog="vfo-adr-sim", description="VFO-ADR path-following batch simulator")
    ap.add_argument("--output-root", type=Path, default=settings.output_root, help="输出根目录（默认 VFO_ADR_OUTPUT_ROOT）")
    ap.add_argument("--decimation", type=int, default=settings.csv_decimation, help="trace.csv 抽样间隔")
    sub = ap.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("config", help="scenario file or bundled id")

    sweep = sub.add_parser("sweep", help="parameter sweep")
    sweep.add_argument("axis", choices=SWEEP_AXES)
    sweep.add_argument("config", help="scenario file or bundled id")
    sweep.add_argument("--values", default=None, help="kp/omega: 1,2,4；delta: 0:0,0.25:0.33")
    sweep.add_argument("--count", type=int, default=20, help="ic: 初始位置个数")
    sweep.add_argument("--radius", type=float, default=0.5, help="ic: 距路径的最大距离 [m]")
    sweep.add_argument("--seed", type=int, default=0, help="ic: 随机种子")
    sweep.add_argument("--max-workers", type=int, default=settings.sweep_max_workers)

    vp = sub.add_parser("validate-path", help="check gradient / Hessian / collinearity bounds")
    vp.add_argument("config", help="scenario file or bundled id")
    vp.add_argument("--samples", type=int, default=2000)
    vp.add_argument("--radius", type=float, default=1.0, help="无解析采样的路径：在初始位置周围立方体网格上检查")

    sub.add_parser("selftest", help="run the fast property test suite")
    sub.add_parser("scenarios", help="list bundled scenarios")
    return ap


def _cmd_run(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    run_dir = Path(args.output_root) / config.scenario_id / "base"
    manifest = execute_run(
        config,
        run_dir,
        decimation=args.decimation,
        progress_every=get_settings().progress_log_every,
    )
    print(json.dumps({"run_dir": str(run_dir), "completed": manifest.completed, "fault": manifest.fault}, ensure_ascii=False))
    if manifest.metrics is not None:
        print((run_dir / "metrics.txt").read_text(encoding="utf-8"), end="")
    return manifest.exit_code


def _cmd_sweep(args: argparse.Namespace) -> int:
    settings = get_settings()
    config = parse_config(args.config)
    jobs = build_sweep_jobs(
        config,
        args.axis,
        values=args.values,
        count=args.count,
        radius=args.radius,
        seed=args.seed,
    )
    sweep_dir = Path(args.output_root) / config.scenario_id / f"sweep-{args.axis}"
    manifests = run_sweep(
        jobs,
        sweep_dir,
        max_workers=args.max_workers,
        decimation=args.decimation,
        progress_every=settings.progress_log_every,
        log_level=settings.log_level,
        log_format=settings.log_format,
    )
    paths = write_comparison(manifests, sweep_dir)
    print(Path(paths["comparison_txt"]).read_text(encoding="utf-8"), end="")
    return EXIT_OK if all(m.completed for m in manifests) else EXIT_FAULT


def _grid_around(center: np.ndarray, radius: float, per_axis: int = 11) -> np.ndarray:
    axis = np.linspace(-radius, radius, per_axis)
    return np.array([center + np.array(d) for d in itertools.product(axis, axis, axis)])


def _cmd_validate_path(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    path = config.build_path()
    if path.sampler is not None:
        samples = sample_path_points(path, args.samples)
    else:
        samples = _grid_around(np.asarray(config.initial.eta0_si[:3], dtype=float), args.radius)
    report = validate_path(path, samples)
    print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
    return EXIT_OK if report.ok else EXIT_FAULT


def _cmd_selftest(args: argparse.Namespace) -> int:
    import pytest

    tests_dir = Path(__file__).resolve().parents[2] / "tests"
    return int(pytest.main(["-m", "not slow", "-q", str(tests_dir)]))


def _cmd_scenarios(args: argparse.Namespace) -> int:
    for scenario_id in list_bundled_scenarios():
        config = parse_config(scenario_id)
        print(f"{scenario_id:<14} {config.description}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "validate-path": _cmd_validate_path,
    "selftest": _cmd_selftest,
    "scenarios": _cmd_scenarios,
}


def main(argv: Sequence[str] | None = None) -> int:
    settings = get_settings()
    configure_logging(settings.log_level, settings.log_format)
    args = _build_parser().parse_args(argv)
    logger.info("cli_started", verb=args.verb, env=settings.app_env)
    try:
        return _COMMANDS[args.verb](args)
    except (ConfigParseError, ConfigValidationError) as e:
        logger.error("config_rejected", code=e.code, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as e:
        logger.error("command_failed", code=e.code, error=e.message)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_FAULT
