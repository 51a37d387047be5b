from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigSchemaError, ConfigValidationError, OutputError


def _env_json_loads(value: str) -> Any:
    """Try JSON, otherwise return the raw string for validators to handle."""
    try:
        return json.loads(value)
    except Exception:
        return value


class Settings(BaseSettings):
    """Runtime settings of the CLI and the job service (not the scenario)."""

    model_config = SettingsConfigDict(
        env_prefix="MMIMO_",
        case_sensitive=False,
        env_json_loads=_env_json_loads,
    )

    # Storage
    storage_root: str = "data/jobs"
    max_job_retention: int = 200

    # Workers / scheduling
    max_workers: int = 1
    max_queue_size: int = 32
    trial_workers: int = 4
    min_system_memory_gb: float = 1.0

    # Monte Carlo defaults used when a request does not set them
    default_trials: int = 20
    default_slots: int = 12

    # Metrics
    metrics_enabled: bool = True

    # Server
    host: str = "0.0.0.0"
    port: int = 8000
    log_level: str = "info"

    @field_validator("max_workers", "trial_workers")
    @classmethod
    def validate_workers(cls, v):
        if v < 1:
            raise ValueError("worker count must be >= 1")
        if v > 128:
            raise ValueError("worker count too large (max 128)")
        return v

    @field_validator("max_queue_size")
    @classmethod
    def validate_max_queue_size(cls, v):
        if v < 1:
            raise ValueError("max_queue_size must be >= 1")
        if v > 10000:
            raise ValueError("max_queue_size too large (max 10000)")
        return v

    @field_validator("default_trials", "default_slots")
    @classmethod
    def validate_monte_carlo_defaults(cls, v):
        if v < 1:
            raise ValueError("trial and slot defaults must be >= 1")
        return v


def load_settings() -> Settings:
    return Settings()


class SystemConfig(BaseModel):
    """
    Scenario of a multi-cell TDD massive MIMO system.

    Powers are normalized SNRs (noise variance is 1 everywhere); the
    physical ceiling of the uplink power is 100 mW. ``downlink_power``
    defaults to ``uplink_power`` and ``num_pilots`` to ``pilot_len``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_cells: int = Field(7, gt=0)
    num_users: int = Field(30, gt=0)
    num_antennas: int = Field(100, gt=0)
    pilot_len: int = Field(30, gt=0)
    frame_len: int = Field(99, gt=0)
    intercell_factor: float = Field(0.3, ge=0.0, le=1.0)
    uplink_power: float = Field(1.0, gt=0.0)
    downlink_power: float = Field(1.0, gt=0.0)
    num_pilots: int = Field(30, gt=0)
    max_class: int = Field(30, gt=0)
    persistence_tol: float = Field(0.05, gt=0.0, lt=1.0)
    rng_seed: int = Field(1, ge=0, lt=2**64)
    # classifier switches
    demotion_mode: Literal["step", "reset"] = "step"
    evaluation_period: int = Field(1, gt=0)

    @model_validator(mode="before")
    @classmethod
    def _fill_dependent_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("downlink_power") is None:
            data["downlink_power"] = data.get("uplink_power", 1.0)
        if data.get("num_pilots") is None:
            data["num_pilots"] = data.get("pilot_len", 30)
        return data

    @field_validator("frame_len")
    @classmethod
    def _frame_holds_data(cls, v: int, info: ValidationInfo) -> int:
        tau = info.data.get("pilot_len")
        if tau is not None and tau >= v:
            raise ValueError(f"frame_len must be > pilot_len ({tau}) so the frame carries data symbols")
        return v

    @property
    def data_symbols(self) -> int:
        return self.frame_len - self.pilot_len


_RANGE_ERRORS = {
    "greater_than",
    "greater_than_equal",
    "less_than",
    "less_than_equal",
    "value_error",
}


def _translate(exc: ValidationError) -> ConfigSchemaError | ConfigValidationError:
    err = exc.errors()[0]
    field = ".".join(str(p) for p in err.get("loc", ())) or None
    message = f"{field}: {err.get('msg')}" if field else str(err.get("msg"))
    if err.get("type") in _RANGE_ERRORS:
        return ConfigValidationError(message, field=field)
    return ConfigSchemaError(message, field=field)


def build_config(**values: Any) -> SystemConfig:
    """Construct a config from keyword values, raising the simulator's config errors."""
    try:
        return SystemConfig(**values)
    except ValidationError as exc:
        raise _translate(exc) from exc


def load_config(text: str) -> SystemConfig:
    """Parse a flat JSON object; missing keys take the scenario defaults."""
    if not text or not text.strip():
        return SystemConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSchemaError(f"config is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise ConfigSchemaError("config document must be a JSON object")
    return build_config(**data)


def validate(config: SystemConfig) -> SystemConfig:
    try:
        SystemConfig.model_validate(config.model_dump())
    except ValidationError as exc:
        raise _translate(exc) from exc
    return config


def emit_config(config: SystemConfig) -> str:
    return json.dumps(config.model_dump(), indent=2, sort_keys=True)


def load_config_file(path: Optional[str | Path]) -> SystemConfig:
    if path is None:
        return SystemConfig()
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot read config {p}: {exc}") from exc
    return load_config(text)
