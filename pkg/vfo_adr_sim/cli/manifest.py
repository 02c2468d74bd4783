from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

from vfo_adr_sim import __version__
from vfo_adr_sim.simulation.metrics import Metrics


class SweepAxis(BaseModel):
    """sweep 中这一次运行对应的参数点"""

    axis: str  # kp / delta / omega / ic
    label: str
    overrides: dict[str, Any] = Field(default_factory=dict)


class RunManifest(BaseModel):
    scenario_id: str
    run_id: str
    # 规范化 JSON 的 SHA-256
    config_hash: str
    completed: bool
    fault: dict[str, Any] | None = None
    sweep: SweepAxis | None = None
    outputs: dict[str, str] = Field(default_factory=dict)
    metrics: Metrics | None = None
    # 各阶段耗时，重复运行时唯一会变化的字段
    timing: dict[str, Any] = Field(default_factory=dict)
    version: str = __version__

    @property
    def exit_code(self) -> int:
        return 0 if self.completed else 1
