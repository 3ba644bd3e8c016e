"""MiniCleanup: a small sequential social dilemma.

Apples grow in an orchard only while the river stays clean; cleaning pays
nothing directly. Agents see a compact egocentric feature tuple instead of
pixels: (zone, pollution bucket, direction to nearest apple, direction to
nearest waste).
"""

from __future__ import annotations

import random
from typing import Sequence

from credotune.config import CleanupConfig
from credotune.envs.base import EnvDescriptor, JointStep
from credotune.errors import ConfigurationError

NORTH, SOUTH, EAST, WEST, STAY, CLEAN = range(6)
ACTION_NAMES = ("N", "S", "E", "W", "stay", "clean")
MOVES = {NORTH: (0, -1), SOUTH: (0, 1), EAST: (1, 0), WEST: (-1, 0)}

RIVER, OPEN, ORCHARD = range(3)
ZONE_NAMES = ("river", "open", "orchard")
DIR_NONE, DIR_HERE, DIR_N, DIR_S, DIR_E, DIR_W = range(6)
DIR_NAMES = ("none", "here", "N", "S", "E", "W")
POLLUTION_BUCKETS = 5
NUM_FEATURE_TUPLES = 3 * POLLUTION_BUCKETS * 6 * 6


def encode_features(zone: int, bucket: int, apple_dir: int, waste_dir: int) -> int:
    return ((zone * POLLUTION_BUCKETS + bucket) * 6 + apple_dir) * 6 + waste_dir


def decode_observation(index: int) -> tuple[int, int, int, int]:
    index, waste_dir = divmod(index, 6)
    index, apple_dir = divmod(index, 6)
    zone, bucket = divmod(index, POLLUTION_BUCKETS)
    return zone, bucket, apple_dir, waste_dir


def pollution_bucket(pollution: float) -> int:
    return min(int(pollution * POLLUTION_BUCKETS), POLLUTION_BUCKETS - 1)


def saturating_linear(pollution: float, restoration: float, depletion: float) -> float:
    """Apple growth factor: 1 at or below ``restoration``, 0 at or above ``depletion``."""
    if pollution <= restoration:
        return 1.0
    if pollution >= depletion:
        return 0.0
    return (depletion - pollution) / (depletion - restoration)


def _direction(dx: int, dy: int) -> int:
    # highest-priority move that shortens the distance, N > S > E > W
    if dy < 0:
        return DIR_N
    if dy > 0:
        return DIR_S
    if dx > 0:
        return DIR_E
    if dx < 0:
        return DIR_W
    return DIR_HERE


class MiniCleanup:
    """Grid of ``grid_width x grid_height`` cells; river on the left, orchard on the right by default."""

    def __init__(self, config: CleanupConfig, num_agents: int):
        self.config = config
        self.num_agents = num_agents
        w, h = config.grid_width, config.grid_height
        if num_agents > w * h:
            raise ConfigurationError(f"grid {w}x{h} cannot hold {num_agents} agents")
        self.descriptor = EnvDescriptor(num_agents, len(ACTION_NAMES), NUM_FEATURE_TUPLES, config.episode_length)
        self.width, self.height = w, h
        self.num_cells = w * h
        r0, r1 = config.river_columns
        o0, o1 = config.orchard_columns
        self.zone_of = [
            RIVER if r0 <= c % w <= r1 else ORCHARD if o0 <= c % w <= o1 else OPEN
            for c in range(self.num_cells)
        ]
        self.river_cells = [c for c in range(self.num_cells) if self.zone_of[c] == RIVER]
        self.orchard_cells = [c for c in range(self.num_cells) if self.zone_of[c] == ORCHARD]
        self.neighbor = [self._neighbors(c) for c in range(self.num_cells)]
        self.clean_area = [self._within(c, config.clean_reach, self.river_cells) for c in range(self.num_cells)]
        self.apple_scan = [self._scan_order(c, self.orchard_cells) for c in range(self.num_cells)]
        self.waste_scan = [self._scan_order(c, self.river_cells) for c in range(self.num_cells)]
        self.rng = random.Random(0)
        self.waste = bytearray(self.num_cells)
        self.apples = bytearray(self.num_cells)
        self.positions: list[int] = []
        self.waste_count = 0
        self.t = 0

    # geometry tables, built once

    def _neighbors(self, c: int) -> list[int]:
        x, y = c % self.width, c // self.width
        out = []
        for a in range(4):
            dx, dy = MOVES[a]
            nx, ny = x + dx, y + dy
            out.append(ny * self.width + nx if 0 <= nx < self.width and 0 <= ny < self.height else c)
        return out

    def _dist(self, a: int, b: int) -> int:
        return abs(a % self.width - b % self.width) + abs(a // self.width - b // self.width)

    def _within(self, c: int, reach: int, cells: list[int]) -> list[int]:
        return [d for d in cells if self._dist(c, d) <= reach]

    def _scan_order(self, c: int, cells: list[int]) -> list[tuple[int, int]]:
        x, y = c % self.width, c // self.width
        found = []
        for d in self._within(c, self.config.sight_radius, cells):
            direction = _direction(d % self.width - x, d // self.width - y)
            found.append((self._dist(c, d), direction, d))
        found.sort()
        return [(d, direction) for _, direction, d in found]

    # dynamics

    @property
    def pollution(self) -> float:
        return self.waste_count / len(self.river_cells) if self.river_cells else 0.0

    def reset(self, seed: int) -> list[int]:
        self.rng = random.Random(seed)
        cfg = self.config
        self.waste = bytearray(self.num_cells)
        self.apples = bytearray(self.num_cells)
        n_waste = int(cfg.initial_pollution * len(self.river_cells))
        for c in self.rng.sample(self.river_cells, n_waste):
            self.waste[c] = 1
        self.waste_count = n_waste
        self.positions = self.rng.sample(range(self.num_cells), self.num_agents)
        self.t = 0
        return self.observations()

    def set_credos(self, credos) -> None:
        pass

    def step(self, joint_actions: Sequence[int]) -> JointStep:
        if len(joint_actions) != self.num_agents:
            raise ValueError(f"expected {self.num_agents} actions, got {len(joint_actions)}")
        for a in joint_actions:
            if not 0 <= a < 6:
                raise ValueError(f"action {a} out of range")
        rng = self.rng
        positions = self.positions

        order = list(range(self.num_agents))
        rng.shuffle(order)
        occupied = set(positions)
        for i in order:
            a = joint_actions[i]
            if a < STAY:
                src = positions[i]
                dst = self.neighbor[src][a]
                if dst != src and dst not in occupied:
                    occupied.discard(src)
                    occupied.add(dst)
                    positions[i] = dst

        waste = self.waste
        river_cleans = [False] * self.num_agents
        for i, a in enumerate(joint_actions):
            if a == CLEAN:
                area = self.clean_area[positions[i]]
                river_cleans[i] = bool(area)
                for c in area:
                    if waste[c]:
                        waste[c] = 0
                        self.waste_count -= 1

        apples = self.apples
        rewards = [0.0] * self.num_agents
        for i, c in enumerate(positions):
            if apples[c]:
                apples[c] = 0
                rewards[i] = 1.0

        p_waste = self.config.waste_spawn_prob
        for c in self.river_cells:
            if not waste[c] and rng.random() < p_waste:
                waste[c] = 1
                self.waste_count += 1

        cfg = self.config
        p_apple = cfg.apple_spawn_max_prob * saturating_linear(
            self.pollution, cfg.threshold_restoration, cfg.threshold_depletion
        )
        if p_apple > 0.0:
            for c in self.orchard_cells:
                if not apples[c] and c not in occupied and rng.random() < p_apple:
                    apples[c] = 1

        self.t += 1
        return JointStep(self.observations(), rewards, self.t >= cfg.episode_length, river_cleans)

    # observations

    def _nearest(self, scan: list[tuple[int, int]], grid: bytearray) -> int:
        for c, direction in scan:
            if grid[c]:
                return direction
        return DIR_NONE

    def observe_features(self, agent_id: int) -> tuple[int, int, int, int]:
        c = self.positions[agent_id]
        return (
            self.zone_of[c],
            pollution_bucket(self.pollution),
            self._nearest(self.apple_scan[c], self.apples),
            self._nearest(self.waste_scan[c], self.waste),
        )

    def observations(self) -> list[int]:
        bucket = pollution_bucket(self.pollution)
        obs = []
        for c in self.positions:
            apple_dir = self._nearest(self.apple_scan[c], self.apples)
            waste_dir = self._nearest(self.waste_scan[c], self.waste)
            obs.append(((self.zone_of[c] * POLLUTION_BUCKETS + bucket) * 6 + apple_dir) * 6 + waste_dir)
        return obs
