"""Population-level measurements: reward, equality, role census, group-size signal analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from credotune.errors import ConfigurationError

PICKER = "picker"
CLEANER = "cleaner"
MIXED = "mixed"


def inverse_gini(rewards: Sequence[float], mean_zero_convention: bool = True) -> float:
    """Equality as ``1 - sum_ij |R_i - R_j| / (2 N^2 mean(R))``.

    With a zero mean the expression is undefined; the convention reports full
    equality (1.0). Passing ``mean_zero_convention=False`` returns NaN instead.
    """
    r = np.asarray(rewards, dtype=np.float64)
    if r.size == 0:
        raise ConfigurationError("inverse_gini needs at least one reward")
    mean = r.mean()
    if mean == 0.0:
        return 1.0 if mean_zero_convention else float("nan")
    if np.all(r == r[0]):
        return 1.0
    # sum over ordered pairs of |x_i - x_j| from sorted values in O(N log N)
    s = np.sort(r)
    n = s.size
    pair_sum = 2.0 * np.sum((2 * np.arange(n) - n + 1) * s)
    return float(1.0 - pair_sum / (2.0 * n * n * mean))


def mean_population_reward(episode_totals: Sequence[float]) -> float:
    totals = np.asarray(episode_totals, dtype=np.float64)
    if totals.size == 0:
        raise ConfigurationError("mean_population_reward needs at least one agent")
    return float(totals.mean())


@dataclass(frozen=True)
class RoleCensus:
    apple_counts: tuple[int, ...]
    clean_counts: tuple[int, ...]
    roles: tuple[str, ...]

    @property
    def pickers(self) -> int:
        return self.roles.count(PICKER)

    @property
    def cleaners(self) -> int:
        return self.roles.count(CLEANER)

    @property
    def mixed(self) -> int:
        return self.roles.count(MIXED)

    def to_dict(self) -> dict:
        return {
            "apple_counts": list(self.apple_counts),
            "clean_counts": list(self.clean_counts),
            "roles": list(self.roles),
            "pickers": self.pickers,
            "cleaners": self.cleaners,
            "mixed": self.mixed,
        }


def classify_role(apples: int, cleans: int, dominance_ratio: float = 3.0) -> str:
    if apples >= dominance_ratio * (cleans + 1):
        return PICKER
    if cleans >= dominance_ratio * (apples + 1):
        return CLEANER
    return MIXED


def classify_roles(
    apple_counts: Sequence[int], clean_counts: Sequence[int], dominance_ratio: float = 3.0
) -> RoleCensus:
    """Label each agent picker, cleaner or mixed by which activity dominates its counts."""
    if dominance_ratio <= 1:
        raise ConfigurationError(f"dominance_ratio must exceed 1, got {dominance_ratio}")
    if len(apple_counts) != len(clean_counts):
        raise ConfigurationError("apple and clean counts differ in length")
    if any(c < 0 for c in apple_counts) or any(c < 0 for c in clean_counts):
        raise ConfigurationError("counts must be non-negative")
    roles = tuple(classify_role(a, c, dominance_ratio) for a, c in zip(apple_counts, clean_counts))
    return RoleCensus(tuple(int(a) for a in apple_counts), tuple(int(c) for c in clean_counts), roles)


def prob_any_nonzero(p_collect: float, n: int) -> float:
    """Probability that at least one of ``n`` independent agents collects a reward."""
    if not 0.0 <= p_collect <= 1.0:
        raise ConfigurationError(f"p_collect must be a probability, got {p_collect}")
    if n < 1:
        raise ConfigurationError(f"n must be positive, got {n}")
    # 1 - (1-p)^n without cancellation for small p
    return float(-np.expm1(n * np.log1p(-p_collect))) if p_collect < 1.0 else 1.0


def per_agent_share(r: float, n: int) -> float:
    if n < 1:
        raise ConfigurationError(f"n must be positive, got {n}")
    return r / n


def confidence_interval(values: Sequence[float]) -> tuple[float, float]:
    """Mean and 95% half-width (normal approximation, 1.96 sample std / sqrt(n))."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ConfigurationError("confidence_interval needs at least one value")
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(1.96 * v.std(ddof=1) / np.sqrt(v.size))
