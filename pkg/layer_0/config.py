"""Run configuration.

Resolution order (last wins): built-in defaults,
``TSRB_*`` environment variables, ``config.json``, command-line flags.
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError

VALID_FACTORS = (2, 4, 8, 16, 32)


class RunConfig(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="TSRB_", extra="ignore")

    data_root: Path = Path(".")
    output_dir: Path = Path("outputs")
    factor: int = 8
    window: int = 9
    c1: float = Field(0.1, gt=0)
    c2: float = Field(0.3, gt=0)
    lam: float = Field(0.99, ge=0.0, le=1.0)
    seed: int = 0
    k: Optional[int] = None
    k_min: int = Field(1, ge=1)
    k_max: int = Field(20, ge=1)
    n_target: Optional[int] = None
    report_format: Literal["table", "row", "both"] = "both"
    rotations_only: bool = False

    @field_validator("factor")
    @classmethod
    def _factor_ok(cls, v: int) -> int:
        if v not in VALID_FACTORS:
            raise ValueError(f"factor must be one of {VALID_FACTORS}, got {v}")
        return v

    @field_validator("window")
    @classmethod
    def _window_ok(cls, v: int) -> int:
        if v < 3 or v % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {v}")
        return v

    @model_validator(mode="after")
    def _k_range_ok(self) -> "RunConfig":
        if self.k_min > self.k_max:
            raise ValueError(f"k_min ({self.k_min}) exceeds k_max ({self.k_max})")
        return self


def load_config(path: Optional[str] = "config.json", overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus flag overrides.

    A missing file is only an error when the caller named one explicitly
    (``path`` other than the default).
    """
    values: Dict[str, Any] = {}
    if path:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as f:
                try:
                    values.update(json.load(f))
                except json.JSONDecodeError as e:
                    raise ConfigError(f"{path} is not valid JSON: {e}") from e
        elif path != "config.json":
            raise ConfigError(f"{path} not found. Copy config.example.json and edit it.")
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
