from __future__ import annotations

import logging
import sys
from typing import Any

import numpy as np
import structlog
from structlog.types import Processor


def _to_builtin(value: Any) -> Any:
    """numpy 标量/数组转为 JSON 可序列化的内置类型"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    return value


def _numpy_processor(logger: logging.Logger, method_name: str, event_dict: dict[str, Any]) -> dict[str, Any]:
    return {k: _to_builtin(v) for k, v in event_dict.items()}


def _add_service_info(logger: logging.Logger, method_name: str, event_dict: dict[str, Any]) -> dict[str, Any]:
    event_dict["service"] = "vfo-adr-sim"
    return event_dict


def _stderr_logger(*args: Any) -> structlog.PrintLogger:
    # 使用调用时的 sys.stderr
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(log_level: str = "INFO", log_format: str = "console") -> None:
    """配置日志系统（json：批处理/CI；console：本地开发）"""

    level = getattr(logging, log_level.upper(), logging.INFO)

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=level,
    )

    shared_processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        _add_service_info,
        _numpy_processor,
        structlog.processors.StackInfoRenderer(),
        structlog.processors.UnicodeDecoder(),
    ]

    if log_format.lower() == "json":
        renderers: list[Processor] = [
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(),
        ]
    else:
        renderers = [structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())]

    structlog.configure(
        processors=shared_processors + renderers,
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def get_logger(name: str | None = None) -> structlog.BoundLogger:
    return structlog.get_logger(name)


def bind_context(**kwargs: Any) -> None:
    """绑定上下文变量（例如 scenario_id / run_id）"""
    structlog.contextvars.bind_contextvars(**kwargs)


def clear_context() -> None:
    structlog.contextvars.clear_contextvars()
