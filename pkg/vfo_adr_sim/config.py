"""
进程级配置（环境变量 / .env）

场景参数（质量矩阵、增益、路径等）不在这里，它们由 simulation.schemas 从 JSON 文件解析。
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    app_env: str = Field(default="local", alias="APP_ENV")
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")
    # json / console
    log_format: str = Field(default="console", alias="LOG_FORMAT")

    output_root: Path = Field(default=Path("./runs"), alias="VFO_ADR_OUTPUT_ROOT")

    # sweep 并发（每个场景一个进程，场景之间不共享状态）
    sweep_max_workers: int = Field(default=4, alias="SWEEP_MAX_WORKERS")

    # 导出 CSV 时的抽样间隔（仿真本身每一步都记录）
    csv_decimation: int = Field(default=10, alias="CSV_DECIMATION")

    # |cos θ| 的奇异裕度
    singularity_margin: float = Field(default=1e-6, alias="SINGULARITY_MARGIN")

    # 每隔多少个积分步输出一次 debug 进度日志（0 表示关闭）
    progress_log_every: int = Field(default=10_000, alias="PROGRESS_LOG_EVERY")


@lru_cache
def get_settings() -> Settings:
    return Settings()
