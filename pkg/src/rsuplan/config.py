"""Runtime settings and the optional YAML configuration file.

Settings come from ``RSUPLAN_*`` environment variables. The configuration file
is a plain YAML mapping the CLI installs as click's ``default_map`` so explicit
flags always win over it.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml

from .errors import ParameterError, ParseError
from .trajectory_db import DuplicateKeyError, safe_load_unique

logger = logging.getLogger(__name__)

DEFAULT_MAX_TRANSVERSALS = 1_000_000
DEFAULT_TIME_BUDGET = 60.0
DEFAULT_POISSON_M = 7
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ParameterError(f"{name} must be an integer, got {raw!r}") from exc


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ParameterError(f"{name} must be a number, got {raw!r}") from exc


@dataclass(frozen=True)
class Settings:
    """Process-wide limits and defaults.

    Attributes:
        max_transversals: Cap on minimal transversals emitted by one enumeration.
        time_budget: Wall-clock seconds allowed per enumeration; ``0`` disables it.
        poisson_m: Default truncation point of the crossing probability sum.
        log_level: Level name used when the CLI configures logging.
    """

    max_transversals: int = DEFAULT_MAX_TRANSVERSALS
    time_budget: float = DEFAULT_TIME_BUDGET
    poisson_m: int = DEFAULT_POISSON_M
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        if self.max_transversals < 1:
            raise ParameterError("max_transversals must be at least 1")
        if self.time_budget < 0:
            raise ParameterError("time_budget must be non-negative")
        if self.poisson_m < 1:
            raise ParameterError("poisson_m must be at least 1")
        if self.log_level not in LOG_LEVELS:
            raise ParameterError(f"log_level must be one of {', '.join(LOG_LEVELS)}")

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            max_transversals=_env_int("RSUPLAN_MAX_TRANSVERSALS", DEFAULT_MAX_TRANSVERSALS),
            time_budget=_env_float("RSUPLAN_TIME_BUDGET", DEFAULT_TIME_BUDGET),
            poisson_m=_env_int("RSUPLAN_POISSON_M", DEFAULT_POISSON_M),
            log_level=os.getenv("RSUPLAN_LOG_LEVEL", "WARNING").upper(),
        )


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a YAML configuration mapping, returning ``{}`` for an empty file."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = safe_load_unique(f)
    except DuplicateKeyError as exc:
        raise ParseError(
            f"option {exc.key!r} is set twice", line=exc.problem_mark.line + 1, source=str(path)
        ) from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}", source=str(path)) from exc

    if data is None:
        logger.warning(f"Configuration file {path} is empty")
        return {}
    if not isinstance(data, dict):
        raise ParseError("configuration must be a mapping of option names", source=str(path))
    return data


def _option_key(key: Any) -> str:
    return str(key).replace("-", "_")


def build_default_map(
    data: Dict[str, Any], commands: Mapping[str, Mapping[str, str]]
) -> Dict[str, Dict[str, Any]]:
    """Turn a configuration mapping into a click ``default_map``.

    Top-level scalar keys apply to every command exposing an option of that
    name. A nested mapping keyed by a command name applies to that command only
    and takes precedence over the top-level keys.

    Args:
        data: Parsed configuration file.
        commands: Command name to a table of accepted keys (long option
            spellings and parameter names, hyphens as underscores) and the
            parameter each one sets.
    """
    default_map: Dict[str, Dict[str, Any]] = {}
    shared = {_option_key(k): v for k, v in data.items() if not isinstance(v, dict)}

    for key in data:
        if isinstance(data[key], dict) and key not in commands:
            logger.warning(f"Ignoring configuration section for unknown command {key!r}")

    for name, aliases in commands.items():
        section: Dict[str, Any] = {aliases[k]: v for k, v in shared.items() if k in aliases}
        own = data.get(name)
        if isinstance(own, dict):
            for k, v in own.items():
                key = _option_key(k)
                if key not in aliases:
                    logger.warning(f"Option {k!r} is not accepted by {name!r}; ignored")
                    continue
                section[aliases[key]] = v
        if section:
            default_map[name] = section
    return default_map


def find_config_file(explicit: Optional[Union[str, Path]] = None) -> Optional[Path]:
    """Return the config path to use: the explicit one, else ``RSUPLAN_CONFIG`` if set."""
    if explicit:
        return Path(explicit)
    env = os.getenv("RSUPLAN_CONFIG")
    return Path(env) if env else None
