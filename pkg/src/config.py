"""Configuration management for the simulator."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Literal

from src.validators.config_file import ConfigFile, parse_config_file
from src.validators.input_validators import ValidationError

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL", "OFF"]
LogBase = Literal["natural", "base2"]
MechanismName = Literal["g_dac", "g_rdac", "gsg_rdac"]


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs of the transfer-function solvers and mechanisms."""

    grid_points: int = 512
    refine_iters: int = 60
    tol: float = 1e-9
    p_max: float = 100.0
    t_max: float | None = None
    t_max_factor: float = 10.0
    bisection_iters: int = 100
    gs_samples: int = 256
    equilibrium_tol: float = 1e-6
    contract_tol: float = 1e-4
    fixed_point_tol: float = 1e-9
    max_fixed_point_iters: int = 10_000
    oracle_grid_points: int = 21
    iteration_safety: int = 1000
    step_refinements: int = 2

    def __post_init__(self) -> None:
        if self.grid_points < 8:
            raise ValidationError(f"must be at least 8, got {self.grid_points}", "grid_points")
        if self.tol <= 0:
            raise ValidationError(f"must be positive, got {self.tol}", "tol")
        if self.p_max <= 0:
            raise ValidationError(f"must be positive, got {self.p_max}", "p_max")
        if self.t_max is not None and self.t_max <= 0:
            raise ValidationError(f"must be positive, got {self.t_max}", "t_max")
        if self.step_refinements < 0:
            raise ValidationError(f"must be nonnegative, got {self.step_refinements}", "step_refinements")
        if self.gs_samples < 2:
            raise ValidationError(f"must be at least 2, got {self.gs_samples}", "gs_samples")

    def time_cap(self, coop_time: float) -> float:
        """Upper bound on access time for a PU with cooperation time ``coop_time``."""
        if self.t_max is not None:
            return self.t_max
        return self.t_max_factor * coop_time


@dataclass(frozen=True)
class TopologyConfig:
    """Geometry and propagation defaults for random topologies."""

    area_side: float = 1500.0
    pu_pair_distance: float = 1000.0
    su_pair_distance: float = 400.0
    distance_jitter: float = 0.1
    pathloss_constant_db: float = -50.0
    pathloss_exponent: float = 2.0
    pu_direct_extra_attenuation_db: float = -20.0
    noise_dbm: float = -105.0
    power_sensitivity: float = 1.0
    coop_time: float = 1.0
    log_base: LogBase = "natural"

    def __post_init__(self) -> None:
        for name in ("pu_pair_distance", "su_pair_distance"):
            if not 0 < getattr(self, name) < self.area_side:
                raise ValidationError(
                    f"must lie in (0, area_side={self.area_side})", name
                )
        if not 0 <= self.distance_jitter < 1:
            raise ValidationError("must lie in [0, 1)", "distance_jitter")
        if self.pathloss_exponent < 1:
            raise ValidationError("must be at least 1", "pathloss_exponent")
        if self.power_sensitivity <= 0:
            raise ValidationError("must be positive", "power_sensitivity")
        if self.coop_time <= 0:
            raise ValidationError("must be positive", "coop_time")


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid of market sizes, seeds and mechanisms swept by an experiment."""

    m_values: tuple[int, ...] = (2,)
    n_values: tuple[int, ...] = tuple(range(1, 9))
    seeds: int = 1000
    mechanisms: tuple[MechanismName, ...] = ("g_dac", "g_rdac")
    epsilon: float = 0.01
    output_directory: Path = field(default_factory=lambda: Path("./data/output"))

    def __post_init__(self) -> None:
        # Use object.__setattr__ because dataclass is frozen
        object.__setattr__(self, "m_values", tuple(self.m_values))
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "mechanisms", tuple(self.mechanisms))
        object.__setattr__(self, "output_directory", Path(self.output_directory))

        if not self.m_values or not self.n_values:
            raise ValidationError("market size lists must be nonempty", "m_values")
        if any(v < 0 for v in self.m_values + self.n_values):
            raise ValidationError("market sizes must be nonnegative", "n_values")
        if self.seeds < 1:
            raise ValidationError(f"must be at least 1, got {self.seeds}", "seeds")
        if not self.mechanisms:
            raise ValidationError("at least one mechanism is required", "mechanisms")
        if self.epsilon <= 0:
            raise ValidationError(f"must be positive, got {self.epsilon}", "epsilon")


@dataclass(frozen=True)
class SimulatorConfig:
    """Configuration for the simulator as a whole."""

    solver: SolverConfig = field(default_factory=SolverConfig)
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    database_path: Path = field(default_factory=lambda: Path("./data/sweeps.db"))
    log_level: LogLevel = "INFO"

    def __post_init__(self) -> None:
        object.__setattr__(self, "database_path", Path(self.database_path))

    def get_numeric_log_level(self) -> int:
        """Convert log level string to numeric value."""
        if self.log_level == "OFF":
            return logging.CRITICAL + 10  # Higher than any standard level
        return getattr(logging, self.log_level)  # type: ignore[no-any-return]


def load_config(path: Path | str | None = None, **overrides: Any) -> SimulatorConfig:
    """
    Build a SimulatorConfig from an optional TOML file.

    Args:
        path: TOML file with [solver], [topology] and [experiment] tables
        **overrides: Top-level SimulatorConfig fields taking precedence

    Returns:
        The validated configuration

    Raises:
        ValidationError: If the file or any value is invalid
    """
    document = parse_config_file(path) if path is not None else ConfigFile()

    config = SimulatorConfig(
        solver=SolverConfig(**document.solver.provided()),
        topology=TopologyConfig(**document.topology.provided()),
        experiment=ExperimentConfig(**document.experiment.provided()),
    )
    if document.log_level is not None:
        config = replace(config, log_level=document.log_level)

    if overrides:
        config = replace(config, **overrides)

    return config


# Global config instance - can be overridden
_config: SimulatorConfig | None = None


def get_config() -> SimulatorConfig:
    """Get the current configuration."""
    global _config
    if _config is None:
        _config = SimulatorConfig()
    return _config


def set_config(config: SimulatorConfig) -> None:
    """Set the global configuration."""
    global _config
    _config = config
