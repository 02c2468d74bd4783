"""
场景文件解析：JSON → ScenarioConfig。

- 语法错误 / 未知键 / 类型错误 → ConfigParseError（带文件、行号、键路径）
- 取值违反约束（θ(0) 越界、ω_o ≤ 0 ...）→ ConfigValidationError（带约束描述）

除文件路径外也接受内置场景 id（scenario_a / scenario_b）。
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from vfo_adr_sim.app_logging import get_logger
from vfo_adr_sim.config import get_settings
from vfo_adr_sim.errors import ConfigParseError, ConfigValidationError
from vfo_adr_sim.simulation.schemas import ScenarioConfig
from vfo_adr_sim.utils import config_hash

logger = get_logger(__name__)

_PARSE_ERROR_TYPES = {"extra_forbidden", "missing", "json_invalid", "json_type"}


def list_bundled_scenarios() -> list[str]:
    root = resources.files(__package__)
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def _read_source(source: str | Path) -> tuple[str, str]:
    path = Path(source)
    if path.is_file():
        return path.read_text(encoding="utf-8"), str(path)

    name = str(source)
    if name in list_bundled_scenarios():
        res = resources.files(__package__).joinpath(f"{name}.json")
        return res.read_text(encoding="utf-8"), f"<bundled:{name}>"

    raise ConfigParseError(
        f"config file not found and not a bundled scenario (bundled: {', '.join(list_bundled_scenarios())})",
        path=name,
    )


def _locate_line(text: str, loc: tuple[Any, ...]) -> int | None:
    """沿键路径依次向后查找 "key"，返回最后命中位置的行号"""
    pos = 0
    found: int | None = None
    for part in loc:
        if not isinstance(part, str):
            continue
        idx = text.find(f'"{part}"', pos)
        if idx < 0:
            break
        pos = found = idx
    if found is None:
        return None
    return text.count("\n", 0, found) + 1


def _is_parse_error(error_type: str) -> bool:
    return error_type in _PARSE_ERROR_TYPES or error_type.endswith("_type") or error_type.endswith("_parsing")


def _strip_prefix(msg: str) -> str:
    for prefix in ("Value error, ", "Assertion failed, "):
        if msg.startswith(prefix):
            return msg[len(prefix) :]
    return msg


def load_config_text(text: str, *, path: str = "<string>") -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"invalid JSON: {e.msg}", path=path, line=e.lineno) from e

    if not isinstance(data, dict):
        raise ConfigParseError("top-level value must be an object", path=path, line=1)
    # 场景文件未给出时使用进程级默认值
    data.setdefault("singularity_margin", get_settings().singularity_margin)

    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first.get("loc", ()))
        key = ".".join(str(p) for p in loc)
        msg = _strip_prefix(str(first.get("msg", "")))
        if _is_parse_error(str(first.get("type", ""))):
            raise ConfigParseError(msg, path=path, line=_locate_line(text, loc), key=key) from e
        raise ConfigValidationError(f"{path}: {key}: {msg}", invariant=msg, key=key) from e

    # M / Δ / Γ 或曲面定义的错误在解析阶段报出
    config.build_plant()
    config.build_path()
    return config


def parse_config(source: str | Path) -> ScenarioConfig:
    text, path = _read_source(source)
    config = load_config_text(text, path=path)
    logger.info(
        "config_parsed",
        scenario_id=config.scenario_id,
        path=path,
        config_hash=config_hash(config.canonical_dict()),
    )
    return config
