"""Run configuration and process settings."""
from __future__ import annotations

import os
from dataclasses import replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal, Mapping

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .core.errors import ConfigError, InvalidArgumentError
from .core.gates import parse_iswap_phase
from .core.readout import DEFAULT_CHI, MAX_CHI, READOUT_TABLES, ReadoutErrorRates, readout_rates

load_dotenv()


class Settings(BaseModel):
    """Process-wide settings loaded from environment variables."""

    log_level: str = Field(default="WARNING", alias="TRANSMON_GROVER_LOG_LEVEL")
    config_path: str | None = Field(default=None, alias="TRANSMON_GROVER_CONFIG")
    out_dir: str = Field(default="results", alias="TRANSMON_GROVER_OUT_DIR")

    model_config = {
        "populate_by_name": True,
        "extra": "ignore",
    }


@lru_cache
def get_settings() -> Settings:
    """Return a cached Settings instance."""

    return Settings(
        log_level=os.getenv("TRANSMON_GROVER_LOG_LEVEL", Settings.model_fields["log_level"].default),
        config_path=os.getenv("TRANSMON_GROVER_CONFIG") or None,
        out_dir=os.getenv("TRANSMON_GROVER_OUT_DIR", Settings.model_fields["out_dir"].default),
    )


class RunConfig(BaseModel):
    """One simulation run. Times in ns, coupling in MHz."""

    # dynamics
    t1_i_ns: float = Field(default=450.0, gt=0)
    t1_ii_ns: float = Field(default=500.0, gt=0)
    tphi_i_ns: float = Field(default=2000.0, gt=0)
    tphi_ii_ns: float = Field(default=2000.0, gt=0)
    noise_enabled: bool = True
    rotation_error: float = Field(default=0.0, gt=-1.0, lt=1.0)
    single_qubit_ns: float = Field(default=25.0, ge=0)
    z_rotation_ns: float = Field(default=5.0, ge=0)
    coupling_mhz: float = Field(default=4.6, gt=0)
    step_idle_ns: float = Field(default=0.0, ge=0)
    pre_readout_idle_ns: float = Field(default=0.0, ge=0)

    # readout
    readout_preset: Literal["operation", "optimal"] = "operation"
    shelving: bool = True
    chi: float = Field(default=DEFAULT_CHI, ge=0.0, le=MAX_CHI)
    e0_i: float | None = Field(default=None, ge=0.0, le=1.0)
    e1_i: float | None = Field(default=None, ge=0.0, le=1.0)
    e0_ii: float | None = Field(default=None, ge=0.0, le=1.0)
    e1_ii: float | None = Field(default=None, ge=0.0, le=1.0)

    # sampling
    shots: int = Field(default=10_000, ge=1)
    tomo_shots: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)
    exact: bool = False
    ideal_prerotations: bool = False

    # conventions
    rotation_sign: int = 1
    iswap_phase: str = "-i"
    decode_axis: Literal["X", "Y"] = "X"

    out_dir: str = "results"
    workers: int = Field(default=4, ge=1)

    model_config = {
        "populate_by_name": True,
        "extra": "forbid",
    }

    @field_validator("rotation_sign")
    @classmethod
    def _check_sign(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError("must be +1 or -1")
        return value

    @field_validator("iswap_phase")
    @classmethod
    def _check_phase(cls, value: str) -> str:
        try:
            phase = parse_iswap_phase(value)
        except InvalidArgumentError as exc:
            raise ValueError(str(exc)) from exc
        return "-i" if phase == -1j else "+i"

    @field_validator("decode_axis", mode="before")
    @classmethod
    def _upper_axis(cls, value: Any) -> Any:
        return value.strip().upper() if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check_contrast(self) -> "RunConfig":
        # ConfigError is not a ValueError, so pydantic lets it through with its key
        preset = READOUT_TABLES[(self.readout_preset, self.shelving)]
        for qubit, (d0, d1) in (("i", preset[0:2]), ("ii", preset[2:4])):
            given0 = getattr(self, f"e0_{qubit}")
            given1 = getattr(self, f"e1_{qubit}")
            e0 = d0 if given0 is None else given0
            e1 = d1 if given1 is None else given1
            if e0 + e1 >= 1.0:
                key = f"e0_{qubit}" if given0 is not None else f"e1_{qubit}"
                raise ConfigError(key, f"e0_{qubit} + e1_{qubit} = {e0 + e1:.6g} leaves no readout contrast")
        return self

    def readout_error_rates(self) -> ReadoutErrorRates:
        """Preset rates with any explicit per-qubit values applied."""

        rates = readout_rates(self.readout_preset, self.shelving, self.chi)
        explicit = {name: getattr(self, name) for name in RATE_KEYS if getattr(self, name) is not None}
        return replace(rates, **explicit)


CONFIG_KEYS = tuple(RunConfig.model_fields)
RATE_KEYS = ("e0_i", "e1_i", "e0_ii", "e1_ii")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file with ``#`` comments.

    Raises ``OSError`` if the file cannot be read and ``ConfigError`` for an
    unknown key or a key without a value.
    """

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    values = dotenv_values(path)
    parsed: dict[str, str] = {}
    for key, value in values.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown configuration key")
        if value is None:
            raise ConfigError(key, "missing value")
        parsed[key] = value
    return parsed


def load_run_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    defaults: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Field defaults, then ``defaults``, then the config file, then ``overrides``.

    ``None`` values in ``overrides`` are skipped so unset CLI flags fall through.
    """

    data: dict[str, Any] = dict(defaults or {})
    if path is not None:
        data.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown configuration key")
        data[key] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = str(error["loc"][0]) if error["loc"] else "config"
        raise ConfigError(key, error["msg"]) from exc


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(values: Mapping[str, Any], header: str | None = None) -> str:
    """Render ``values`` in the config-file format, keys in declaration order."""

    lines = [f"# {line}" for line in header.splitlines()] if header else []
    for key in CONFIG_KEYS:
        if key in values and values[key] is not None:
            lines.append(f"{key} = {_format_value(values[key])}")
    return "\n".join(lines) + "\n"
