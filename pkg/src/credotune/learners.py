"""Independent tabular Q-learners used as the per-step behavioral policy."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from credotune.config import LearnerConfig


@dataclass(frozen=True)
class Transition:
    obs: int
    action: int
    credo_reward: float
    next_obs: int
    terminal: bool


class QLearner:
    """Epsilon-greedy Q-learning over a zero-initialised table.

    Greedy ties go to the lowest action index. Epsilon decays linearly with
    the number of actions selected.
    """

    def __init__(self, num_obs: int, num_actions: int, config: LearnerConfig, rng: random.Random):
        self.num_obs = num_obs
        self.num_actions = num_actions
        self.config = config
        self.rng = rng
        # rows as plain lists: scalar access in the step loop is far cheaper than numpy indexing
        self.q = [[0.0] * num_actions for _ in range(num_obs)]
        self.steps = 0

    @property
    def epsilon(self) -> float:
        cfg = self.config
        frac = min(self.steps / cfg.epsilon_decay_steps, 1.0)
        return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)

    def greedy(self, obs: int) -> int:
        row = self.q[obs]
        return row.index(max(row))

    def select_action(self, obs: int) -> int:
        eps = self.epsilon
        self.steps += 1
        if eps > 0.0:
            rand = self.rng.random
            if rand() < eps:
                return int(rand() * self.num_actions)
        row = self.q[obs]
        return row.index(max(row))

    def update(self, t: Transition) -> None:
        self.learn(t.obs, t.action, t.credo_reward, t.next_obs, t.terminal)

    def learn(self, obs: int, action: int, reward: float, next_obs: int, terminal: bool) -> None:
        """Unpacked form of :meth:`update` for the step loop."""
        cfg = self.config
        target = reward
        if not terminal:
            target += cfg.gamma * max(self.q[next_obs])
        row = self.q[obs]
        row[action] += cfg.alpha * (target - row[action])

    def q_table(self) -> np.ndarray:
        return np.array(self.q, dtype=np.float64)

    def load_q_table(self, table: np.ndarray) -> None:
        table = np.asarray(table, dtype=np.float64)
        if table.shape != (self.num_obs, self.num_actions):
            raise ValueError(f"Q-table shape {table.shape} does not match ({self.num_obs}, {self.num_actions})")
        self.q = table.tolist()
