"""Experiment configuration models.

Configs are plain YAML documents validated by pydantic; unknown keys are
rejected so typos fail loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any, Literal, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from credotune.credo_core import validate_credo
from credotune.errors import ConfigurationError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CleanupConfig(_Strict):
    kind: Literal["cleanup"] = "cleanup"
    grid_width: int = Field(12, gt=0)
    grid_height: int = Field(9, gt=0)
    river_columns: tuple[int, int] = (0, 1)
    orchard_columns: tuple[int, int] = (9, 11)
    waste_spawn_prob: float = Field(0.05, ge=0, le=1)
    apple_spawn_max_prob: float = Field(0.2, ge=0, le=1)
    threshold_depletion: float = Field(0.5, ge=0, le=1)
    threshold_restoration: float = Field(0.25, ge=0, le=1)
    initial_pollution: float = Field(0.5, ge=0, le=1)
    sight_radius: int = Field(4, gt=0)
    clean_reach: int = Field(1, ge=0)
    episode_length: int = Field(200, gt=0)

    @model_validator(mode="after")
    def _check_geometry(self) -> CleanupConfig:
        for name in ("river_columns", "orchard_columns"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi < self.grid_width:
                raise ValueError(f"{name} must be an inclusive range inside 0..{self.grid_width - 1}")
        (r0, r1), (o0, o1) = self.river_columns, self.orchard_columns
        if not (r1 < o0 or o1 < r0):
            raise ValueError("river_columns and orchard_columns overlap")
        if not self.threshold_restoration < self.threshold_depletion:
            raise ValueError("threshold_restoration must be below threshold_depletion")
        return self


class BanditConfig(_Strict):
    """Stateless environment paying each agent for how close its credo is to a target."""

    kind: Literal["bandit"] = "bandit"
    target: tuple[float, float, float] = (0.8, 0.2, 0.0)
    noise_sigma: float = Field(0.05, ge=0)
    episode_length: int = Field(1, gt=0)

    @field_validator("target")
    @classmethod
    def _target_on_simplex(cls, v):
        problem = validate_credo(v)
        if problem:
            raise ValueError(problem)
        return v


EnvConfig = Annotated[Union[CleanupConfig, BanditConfig], Field(discriminator="kind")]


class LearnerConfig(_Strict):
    alpha: float = Field(0.1, gt=0, le=1)
    gamma: float = Field(0.95, ge=0, lt=1)
    epsilon_start: float = Field(1.0, ge=0, le=1)
    epsilon_end: float = Field(0.05, ge=0, le=1)
    epsilon_decay_steps: int = Field(100_000, gt=0)

    @model_validator(mode="after")
    def _check_schedule(self) -> LearnerConfig:
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon_end must not exceed epsilon_start")
        return self


class CredoPolicyConfig(_Strict):
    epsilon: float = Field(0.2, ge=0, le=1)
    alpha_hi: float = Field(0.1, gt=0, le=1)
    gamma_hi: float = Field(0.9, ge=0, lt=1)
    resolution: float = Field(0.2, gt=0, le=1)
    q_init: float = 0.0
    batch_reward_source: Literal["credo", "env"] = "credo"

    @field_validator("resolution")
    @classmethod
    def _integral_steps(cls, v):
        steps = round(1 / v)
        if abs(steps * v - 1) > 1e-9:
            raise ValueError(f"1/resolution must be an integer, got 1/{v}")
        return v


class ExperimentConfig(_Strict):
    env: EnvConfig = Field(default_factory=CleanupConfig)
    num_agents: int = Field(6, gt=0)
    team_size: int = Field(2, gt=0)
    credo_mode: Literal["static", "tuning"] = "static"
    initial_credos: list[tuple[float, float, float]] | tuple[float, float, float] = (0.0, 0.0, 1.0)
    episodes_per_batch: int = Field(4, ge=1)
    total_batches: int = Field(300, gt=0)
    learner: LearnerConfig = Field(default_factory=LearnerConfig)
    credo_policy: CredoPolicyConfig = Field(default_factory=CredoPolicyConfig)
    trials: int = Field(1, ge=1)
    master_seed: int = Field(0, ge=0, lt=2**64)
    checkpoint_every: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check(self) -> ExperimentConfig:
        if self.num_agents % self.team_size:
            raise ValueError(
                f"num_agents ({self.num_agents}) must be divisible by team_size ({self.team_size})"
            )
        credos = self.credo_list()
        if len(credos) != self.num_agents:
            raise ValueError(f"initial_credos lists {len(credos)} credos for {self.num_agents} agents")
        for i, c in enumerate(credos):
            problem = validate_credo(c)
            if problem:
                raise ValueError(f"initial_credos[{i}]: {problem}")
            if self.credo_mode == "tuning":
                res = self.credo_policy.resolution
                if any(abs(round(x / res) * res - x) > 1e-9 for x in c):
                    raise ValueError(f"initial_credos[{i}] is not on the resolution-{res} credo lattice")
        return self

    def credo_list(self) -> list[tuple[float, float, float]]:
        """Per-agent initial credos; a single triple applies to every agent."""
        c = self.initial_credos
        if isinstance(c, tuple):
            return [c] * self.num_agents
        return list(c)


def _format_validation_error(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data or {})
    except ValidationError as err:
        raise ConfigurationError(_format_validation_error(err)) from None


def apply_overrides(data: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply ``dotted.key=value`` overrides; values are parsed as YAML scalars/lists."""
    data = dict(data or {})
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        value = yaml.safe_load(raw)
        parts = key.strip().split(".")
        node = data
        for p in parts[:-1]:
            child = node.get(p)
            child = dict(child) if isinstance(child, dict) else {}
            node[p] = child
            node = child
        node[parts[-1]] = value
    return data


def load_config(path: str | Path, overrides: list[str] | None = None) -> ExperimentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path}: {err.strerror}") from None
    except yaml.YAMLError as err:
        raise ConfigurationError(f"config {path} is not valid YAML: {err}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must be a mapping at top level")
    return parse_config(apply_overrides(data or {}, overrides or []))


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    return config.model_dump(mode="json")
