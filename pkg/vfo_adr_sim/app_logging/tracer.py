"""
运行阶段计时：simulate / metrics / export。

结果写入 manifest.json 的 timing 字段；阶段耗时是 manifest 中唯一随运行变化的内容。
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

from .logger import get_logger

logger = get_logger(__name__)


@dataclass
class TraceStep:
    name: str
    status: str = "running"  # running / success / failed
    duration_ms: float = 0.0
    output: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "name": self.name,
            "status": self.status,
            "duration_ms": round(self.duration_ms, 3),
        }
        if self.output:
            result["output"] = self.output
        if self.error:
            result["error"] = self.error
        return result


class Tracer:
    """按顺序记录一次运行的各个阶段"""

    def __init__(self, scenario_id: str, run_id: str = "base"):
        self.scenario_id = scenario_id
        self.run_id = run_id
        self.stages: list[TraceStep] = []
        self._started = time.perf_counter()

    @contextmanager
    def stage(self, name: str) -> Iterator[dict[str, Any]]:
        """
        with tracer.stage("simulate") as out:
            out["samples"] = ...

        阶段内抛出的异常照常向外传播，阶段状态记为 failed。
        """
        step = TraceStep(name=name)
        self.stages.append(step)
        started = time.perf_counter()
        try:
            yield step.output
        except Exception as e:
            step.status = "failed"
            step.error = str(e)
            raise
        else:
            step.status = "success"
        finally:
            step.duration_ms = (time.perf_counter() - started) * 1000.0
            logger.debug(
                "stage_finished",
                scenario_id=self.scenario_id,
                run_id=self.run_id,
                stage=name,
                status=step.status,
                duration_ms=round(step.duration_ms, 3),
            )

    @property
    def total_ms(self) -> float:
        return (time.perf_counter() - self._started) * 1000.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario_id": self.scenario_id,
            "run_id": self.run_id,
            "total_ms": round(self.total_ms, 3),
            "stages": [s.to_dict() for s in self.stages],
        }
