"""High-level credo-tuning policy: Q-learning over a discretised credo simplex.

Credos live on a lattice of integer step counts ``(s_psi, s_phi, s_omega)``
summing to ``1/resolution``, so moving around never drifts off the simplex.
A move transfers one step from one component to another; moves that would
push a component out of ``[0, 1]`` leave the credo unchanged.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from credotune.config import CredoPolicyConfig
from credotune.credo_core import COMPONENTS, CredoVector
from credotune.errors import ConfigurationError


def lattice_steps(resolution: float) -> int:
    steps = round(1.0 / resolution)
    if steps < 1 or abs(steps * resolution - 1.0) > 1e-9:
        raise ConfigurationError(f"1/resolution must be a positive integer, got 1/{resolution}")
    return steps


@dataclass(frozen=True, order=True)
class CredoLatticePoint:
    steps: tuple[int, int, int]
    resolution: float = 0.2

    def __post_init__(self) -> None:
        total = lattice_steps(self.resolution)
        if len(self.steps) != 3 or any(s < 0 for s in self.steps) or sum(self.steps) != total:
            raise ConfigurationError(f"{self.steps} is not a resolution-{self.resolution} lattice point")

    @classmethod
    def from_credo(cls, credo, resolution: float = 0.2) -> CredoLatticePoint:
        values = credo.as_tuple() if isinstance(credo, CredoVector) else tuple(credo)
        steps = tuple(round(v / resolution) for v in values)
        if any(abs(s * resolution - v) > 1e-9 for s, v in zip(steps, values)):
            raise ConfigurationError(f"credo {values} is not on the resolution-{resolution} lattice")
        return cls(steps, resolution)

    @property
    def values(self) -> tuple[float, float, float]:
        total = sum(self.steps)
        return tuple(s / total for s in self.steps)

    def credo(self) -> CredoVector:
        return CredoVector(*self.values)


@dataclass(frozen=True)
class CredoMove:
    """Transfer one lattice step from ``source`` to ``dest``; both ``None`` means no-op."""

    source: int | None = None
    dest: int | None = None

    @property
    def is_noop(self) -> bool:
        return self.source is None

    def __str__(self) -> str:
        if self.is_noop:
            return "no_op"
        return f"{COMPONENTS[self.source]}->{COMPONENTS[self.dest]}"


NO_OP = CredoMove()
# ordered transfers first, no-op last
MOVES: tuple[CredoMove, ...] = tuple(CredoMove(s, d) for s, d in permutations(range(3), 2)) + (NO_OP,)


def enumerate_lattice(resolution: float = 0.2) -> list[CredoLatticePoint]:
    """All lattice points in lexicographic order of their step triples."""
    n = lattice_steps(resolution)
    return [CredoLatticePoint((a, b, n - a - b), resolution) for a in range(n + 1) for b in range(n - a + 1)]


def apply_move(point: CredoLatticePoint, move: CredoMove) -> CredoLatticePoint:
    if move.is_noop:
        return point
    steps = list(point.steps)
    if steps[move.source] == 0 or steps[move.dest] == sum(steps):
        return point
    steps[move.source] -= 1
    steps[move.dest] += 1
    return CredoLatticePoint(tuple(steps), point.resolution)


class CredoPolicy:
    def __init__(self, config: CredoPolicyConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.lattice = enumerate_lattice(config.resolution)
        self.index = {p.steps: k for k, p in enumerate(self.lattice)}
        self.q = np.full((len(self.lattice), len(MOVES)), float(config.q_init))

    def state_index(self, point: CredoLatticePoint) -> int:
        return self.index[point.steps]

    def greedy_index(self, point: CredoLatticePoint) -> int:
        return int(np.argmax(self.q[self.state_index(point)]))

    def select(self, point: CredoLatticePoint) -> CredoMove:
        if self.config.epsilon > 0.0 and self.rng.random() < self.config.epsilon:
            return MOVES[self.rng.randrange(len(MOVES))]
        return MOVES[self.greedy_index(point)]

    def update(
        self, point: CredoLatticePoint, move: CredoMove, batch_reward: float, next_point: CredoLatticePoint
    ) -> None:
        s, s2 = self.state_index(point), self.state_index(next_point)
        a = MOVES.index(move)
        target = batch_reward + self.config.gamma_hi * self.q[s2].max()
        self.q[s, a] += self.config.alpha_hi * (target - self.q[s, a])

    def greedy_trajectory(self, start: CredoLatticePoint, length: int) -> list[CredoLatticePoint]:
        path = [start]
        for _ in range(length):
            path.append(apply_move(path[-1], MOVES[self.greedy_index(path[-1])]))
        return path

