from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence


@dataclass(frozen=True)
class EnvDescriptor:
    num_agents: int
    num_actions: int
    observation_space_size: int
    episode_length: int

    def __post_init__(self) -> None:
        for name in ("num_agents", "num_actions", "observation_space_size", "episode_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass
class JointStep:
    observations: list[int]
    rewards: list[float]
    done: bool
    # per-agent flag: fired a clean action that reached the river (None if the env has no cleaning)
    river_cleans: list[bool] | None = None


class Environment(Protocol):
    descriptor: EnvDescriptor

    def reset(self, seed: int) -> list[int]: ...

    def step(self, joint_actions: Sequence[int]) -> JointStep: ...

    def set_credos(self, credos: Sequence[tuple[float, float, float]]) -> None:
        """Notify the environment of the credos in force; most environments ignore this."""
