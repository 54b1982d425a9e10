"""
Budgets and switches shared by all operations.

Settings are read from ``config/cubeabs_config.yaml`` and then overridden by
``HDA_*`` environment variables (``HDA_BUDGET_PATHS``, ``HDA_ORACLE_BOUND``,
...). Every integer field ``foo`` is overridable as ``HDA_FOO`` or
``HDA_BUDGET_FOO``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional
import os

from pydantic import BaseModel, Field, ValidationError
import yaml

from ._logger import logger
from .errors import ArgumentError

logger.debug(f"Loading module {__name__}.")

DEFAULT_CONFIG = (
    Path(__file__).resolve().parent.parent / "config" / "cubeabs_config.yaml"
)


class Settings(BaseModel):
    budget_paths: int = Field(default=10**6, ge=1)
    budget_states: int = Field(default=10**5, ge=1)
    oracle_bound: int = Field(default=64, ge=0)
    oracle_pairs: int = Field(default=200_000, ge=1)
    search_depth: int = Field(default=2, ge=0)
    max_degree: int = Field(default=8, ge=0)
    trace_bound: int = Field(default=8, ge=0)
    progress: bool = False
    export_csv: bool = False
    output_dir: Optional[Path] = None


_settings: Settings | None = None


def _env_overrides() -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for name, field in Settings.model_fields.items():
        if field.annotation is not int:
            continue
        bare = name.upper()
        if bare.startswith("BUDGET_"):
            bare = bare[len("BUDGET_"):]
        for key in (f"HDA_{name.upper()}", f"HDA_BUDGET_{bare}"):
            if key in os.environ:
                try:
                    overrides[name] = int(os.environ[key])
                except ValueError as e:
                    raise ArgumentError(
                        f"environment variable {key} is not an integer"
                    ) from e
    return overrides


def load_settings(
    path: str | Path | None = None, **overrides: Any
) -> Settings:
    """
    Build settings from a YAML file, the environment and explicit overrides.

    Args:
        path: YAML file; the bundled ``config/cubeabs_config.yaml`` when None.
        overrides: field values taking precedence over file and environment;
            None values are ignored.
    """
    data: dict[str, Any] = {}
    config_path = Path(path) if path is not None else DEFAULT_CONFIG

    if config_path.exists():
        with open(config_path, "r") as f:
            loaded = yaml.safe_load(f) or {}
        data.update(loaded.get("settings", loaded))
        logger.debug(f"Settings read from {config_path}")
    elif path is not None:
        raise ArgumentError(f"configuration file not found: {config_path}")

    data.update(_env_overrides())
    data.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**data)
    except ValidationError as e:
        raise ArgumentError(f"invalid settings: {e}") from e


def get_settings() -> Settings:
    """Process-wide settings, loaded lazily."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def set_settings(settings: Settings | None) -> None:
    """Replace the process-wide settings; None forces a reload."""
    global _settings
    _settings = settings
