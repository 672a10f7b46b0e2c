"""Scenario/solver/sweep configuration files (TOML or JSON).

The scenario block mirrors LinkScenario field names, with every dB/dBm
quantity suffixed explicitly. Optional [solver] and [sweep] blocks map onto
SolverConfig and SweepSpec. Unknown keys and missing required fields raise
ConfigError naming the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import tomli

from .linkbudget import LinkScenario
from .relay_opt import SolverConfig

SWEEP_VARIABLES = ("p_s_dbm", "p_r_dbm", "si_suppression_db", "d_rd")


class ConfigError(ValueError):
    """Configuration schema violation; message names the field."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int
    linked: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if self.steps < 2:
            raise ConfigError("sweep.steps must be >= 2")
        if not self.start < self.stop:
            raise ConfigError("sweep.start must be < sweep.stop")

    def values(self) -> list[float]:
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * step for i in range(self.steps)]


_SCENARIO_REQUIRED = (
    "d_sr",
    "d_rd",
    "f_c",
    "gamma",
    "bandwidth",
    "noise_psd_dbm_hz",
    "p_s_dbm",
    "p_r_dbm",
    "si_suppression_db",
)
_SCENARIO_OPTIONAL = ("noise_psd_rd_dbm_hz",)

_SOLVER_KEYS = (
    "grid_points",
    "x_max_multiplier",
    "grid_resolution_noise_sd",
    "tol_bits",
    "tol_xth",
    "stat_tol",
    "max_outer",
    "max_inner",
    "max_bisect",
    "quadrature_order",
    "entropy_grid_step_sd",
    "prune_eps",
    "max_grid_points",
)

_SWEEP_KEYS = ("variable", "start", "stop", "steps", "linked")


@dataclass(frozen=True)
class RunConfig:
    scenario: LinkScenario
    solver: SolverConfig
    sweep: SweepSpec | None


def _coerce_suppression(v):
    if isinstance(v, str):
        if v.lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ConfigError(f"scenario.si_suppression_db: cannot parse {v!r}")
    return float(v)


def _parse_scenario(block: dict) -> LinkScenario:
    missing = [k for k in _SCENARIO_REQUIRED if k not in block]
    if missing:
        raise ConfigError(f"scenario is missing required field {missing[0]!r}")
    unknown = [k for k in block if k not in _SCENARIO_REQUIRED + _SCENARIO_OPTIONAL]
    if unknown:
        raise ConfigError(f"scenario has unknown field {unknown[0]!r}")
    kwargs = {k: float(block[k]) for k in _SCENARIO_REQUIRED if k != "si_suppression_db"}
    kwargs["si_suppression_db"] = _coerce_suppression(block["si_suppression_db"])
    if "noise_psd_rd_dbm_hz" in block:
        kwargs["noise_psd_rd_dbm_hz"] = float(block["noise_psd_rd_dbm_hz"])
    try:
        return LinkScenario(**kwargs)
    except ValueError as e:
        raise ConfigError(f"scenario: {e}") from e


def _parse_solver(block: dict) -> SolverConfig:
    unknown = [k for k in block if k not in _SOLVER_KEYS]
    if unknown:
        raise ConfigError(f"solver has unknown field {unknown[0]!r}")
    kwargs = dict(block)
    if "grid_points" in kwargs and kwargs["grid_points"] is not None:
        kwargs["grid_points"] = int(kwargs["grid_points"])
    for k in ("max_outer", "max_inner", "max_bisect", "quadrature_order", "max_grid_points"):
        if k in kwargs:
            kwargs[k] = int(kwargs[k])
    try:
        return SolverConfig(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"solver: {e}") from e


def _parse_sweep(block: dict) -> SweepSpec:
    unknown = [k for k in block if k not in _SWEEP_KEYS]
    if unknown:
        raise ConfigError(f"sweep has unknown field {unknown[0]!r}")
    missing = [k for k in ("variable", "start", "stop", "steps") if k not in block]
    if missing:
        raise ConfigError(f"sweep is missing required field {missing[0]!r}")
    return SweepSpec(
        variable=str(block["variable"]),
        start=float(block["start"]),
        stop=float(block["stop"]),
        steps=int(block["steps"]),
        linked=bool(block.get("linked", False)),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_bytes()
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {path}: {e}") from e
    else:
        try:
            raw = tomli.loads(text.decode("utf-8"))
        except tomli.TOMLDecodeError as e:
            raise ConfigError(f"invalid TOML in {path}: {e}") from e
    if "scenario" not in raw:
        raise ConfigError("config is missing required block 'scenario'")
    unknown = [k for k in raw if k not in ("scenario", "solver", "sweep")]
    if unknown:
        raise ConfigError(f"config has unknown block {unknown[0]!r}")
    scenario = _parse_scenario(raw["scenario"])
    solver = _parse_solver(raw.get("solver", {}))
    sweep = _parse_sweep(raw["sweep"]) if "sweep" in raw else None
    return RunConfig(scenario=scenario, solver=solver, sweep=sweep)
