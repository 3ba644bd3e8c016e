"""Credo-response bandit: a synthetic, stateless environment whose payoff depends only on credo.

Useful as a ground-truth oracle for the credo-tuning policy: the expected
payoff is maximal exactly at a known target lattice point.
"""

from __future__ import annotations

import random
from typing import Sequence

from credotune.config import BanditConfig
from credotune.envs.base import EnvDescriptor, JointStep


def bandit_batch_reward(
    target: Sequence[float], current: Sequence[float], noise_sigma: float, rng: random.Random
) -> float:
    """``1 - L1(current, target) / 2`` plus Gaussian noise."""
    l1 = sum(abs(c - t) for c, t in zip(current, target))
    noise = rng.gauss(0.0, noise_sigma) if noise_sigma > 0 else 0.0
    return 1.0 - l1 / 2.0 + noise


class CredoResponseBandit:
    def __init__(self, config: BanditConfig, num_agents: int):
        self.config = config
        self.num_agents = num_agents
        self.descriptor = EnvDescriptor(num_agents, 1, 1, config.episode_length)
        self.credos: list[tuple[float, float, float]] = [(0.0, 0.0, 1.0)] * num_agents
        self.rng = random.Random(0)
        self.t = 0

    def set_credos(self, credos) -> None:
        self.credos = [tuple(c) for c in credos]

    def reset(self, seed: int) -> list[int]:
        self.rng = random.Random(seed)
        self.t = 0
        return [0] * self.num_agents

    def step(self, joint_actions: Sequence[int]) -> JointStep:
        if any(a != 0 for a in joint_actions):
            raise ValueError("the bandit has a single action 0")
        cfg = self.config
        rewards = [bandit_batch_reward(cfg.target, c, cfg.noise_sigma, self.rng) for c in self.credos]
        self.t += 1
        return JointStep([0] * self.num_agents, rewards, self.t >= cfg.episode_length)
