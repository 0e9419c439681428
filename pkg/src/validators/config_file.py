"""Schema of the TOML configuration file."""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from src.validators.input_validators import ValidationError, validate_file_path


class _Section(BaseModel):
    """
    Constraints only: a key left out of the file stays unset, and the
    dataclasses in ``src.config`` supply its default.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    def provided(self) -> dict[str, Any]:
        """Keys present in the file, ready to pass to a config dataclass."""
        return self.model_dump(exclude_unset=True)


class SolverSection(_Section):
    grid_points: int | None = Field(default=None, ge=8)
    refine_iters: int | None = Field(default=None, ge=0)
    tol: float | None = Field(default=None, gt=0)
    p_max: float | None = Field(default=None, gt=0)
    t_max: float | None = Field(default=None, gt=0)
    t_max_factor: float | None = Field(default=None, gt=0)
    bisection_iters: int | None = Field(default=None, ge=1)
    gs_samples: int | None = Field(default=None, ge=2)
    equilibrium_tol: float | None = Field(default=None, gt=0)
    contract_tol: float | None = Field(default=None, gt=0)
    fixed_point_tol: float | None = Field(default=None, gt=0)
    max_fixed_point_iters: int | None = Field(default=None, ge=1)
    oracle_grid_points: int | None = Field(default=None, ge=2)
    iteration_safety: int | None = Field(default=None, ge=0)
    step_refinements: int | None = Field(default=None, ge=0)


class TopologySection(_Section):
    area_side: float | None = Field(default=None, gt=0)
    pu_pair_distance: float | None = Field(default=None, gt=0)
    su_pair_distance: float | None = Field(default=None, gt=0)
    distance_jitter: float | None = Field(default=None, ge=0, lt=1)
    pathloss_constant_db: float | None = None
    pathloss_exponent: float | None = Field(default=None, ge=1)
    pu_direct_extra_attenuation_db: float | None = None
    noise_dbm: float | None = None
    power_sensitivity: float | None = Field(default=None, gt=0)
    coop_time: float | None = Field(default=None, gt=0)
    log_base: Literal["natural", "base2"] | None = None


class ExperimentSection(_Section):
    m_values: list[int] | None = Field(default=None, min_length=1)
    n_values: list[int] | None = Field(default=None, min_length=1)
    seeds: int | None = Field(default=None, ge=1)
    mechanisms: list[Literal["g_dac", "g_rdac", "gsg_rdac"]] | None = Field(default=None, min_length=1)
    epsilon: float | None = Field(default=None, gt=0)
    output_directory: str | None = None


class ConfigFile(_Section):
    """Top-level document: one optional table per configuration object."""

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL", "OFF"] | None = None
    solver: SolverSection = Field(default_factory=SolverSection)
    topology: TopologySection = Field(default_factory=TopologySection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)


def parse_config_file(path: Any) -> ConfigFile:
    """
    Read and validate a TOML configuration file.

    Unknown keys anywhere in the document are rejected.

    Raises:
        ValidationError: If the file is missing, is not TOML, or fails the schema
    """
    config_path = validate_file_path(path, must_exist=True, allowed_extensions=(".toml",), field="config")

    try:
        with open(config_path, "rb") as f:
            raw = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ValidationError(f"Invalid TOML: {e}", "config") from e

    return parse_config_mapping(raw)


def parse_config_mapping(raw: dict[str, Any]) -> ConfigFile:
    """Validate an already-decoded configuration mapping."""
    try:
        return ConfigFile.model_validate(raw)
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ValidationError(first["msg"], location or "config") from e
