"""Credo vectors, team structures and the ratio-normalised reward redistribution.

Each agent blends three reward channels according to its credo
``(psi, phi, omega)``:

* self   -- ``psi_i * R_i``
* team   -- a share of the team pot ``sum_{j in T_i} phi_j R_j`` proportional
  to ``phi_i / sum_{j in T_i} phi_j``
* system -- a share of the system pot ``sum_j omega_j R_j`` proportional to
  ``omega_i / sum_j omega_j``

Every unit of environmental reward ends up somewhere, so the population total
is conserved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from credotune.errors import ConfigurationError

SIMPLEX_TOL = 1e-9
COMPONENTS = ("psi", "phi", "omega")


def validate_credo(cr: Sequence[float]) -> str | None:
    """Return ``None`` if ``cr`` lies on the unit simplex, else a description of the violation."""
    if len(cr) != 3:
        return f"credo must have 3 components, got {len(cr)}"
    for name, value in zip(COMPONENTS, cr):
        if not np.isfinite(value):
            return f"{name} is not finite ({value})"
        if value < -SIMPLEX_TOL:
            return f"{name} is negative ({value:g})"
        if value > 1.0 + SIMPLEX_TOL:
            return f"{name} exceeds 1 ({value:g})"
    total = float(sum(cr))
    if abs(total - 1.0) > SIMPLEX_TOL:
        return f"credo components sum to {total:g} (must be 1 within {SIMPLEX_TOL:g})"
    return None


@dataclass(frozen=True)
class CredoVector:
    """Self/team/system weights of one agent."""

    psi: float
    phi: float
    omega: float

    def __post_init__(self) -> None:
        problem = validate_credo((self.psi, self.phi, self.omega))
        if problem is not None:
            raise ConfigurationError(problem)

    @classmethod
    def of(cls, values: Iterable[float]) -> CredoVector:
        values = tuple(float(v) for v in values)
        problem = validate_credo(values)
        if problem is not None:
            raise ConfigurationError(problem)
        return cls(*values)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.psi, self.phi, self.omega)


@dataclass(frozen=True)
class TeamStructure:
    """A partition of agents ``0..num_agents-1`` into disjoint, non-empty teams."""

    num_agents: int
    teams: tuple[frozenset[int], ...]

    def __init__(self, num_agents: int, teams: Iterable[Iterable[int]]):
        teams = tuple(frozenset(int(a) for a in team) for team in teams)
        if num_agents < 1:
            raise ConfigurationError(f"num_agents must be positive, got {num_agents}")
        seen: set[int] = set()
        for k, team in enumerate(teams):
            if not team:
                raise ConfigurationError(f"team {k} is empty")
            overlap = seen & team
            if overlap:
                raise ConfigurationError(f"agents {sorted(overlap)} appear in more than one team")
            seen |= team
        if seen != set(range(num_agents)):
            missing = sorted(set(range(num_agents)) - seen)
            extra = sorted(seen - set(range(num_agents)))
            raise ConfigurationError(
                f"teams must cover agents 0..{num_agents - 1} exactly (missing {missing}, unknown {extra})"
            )
        object.__setattr__(self, "num_agents", int(num_agents))
        object.__setattr__(self, "teams", teams)

    @classmethod
    def consecutive(cls, num_agents: int, team_size: int) -> TeamStructure:
        """Teams as consecutive id blocks: ``{0,1}, {2,3}, ...`` for team_size 2."""
        if team_size < 1 or num_agents % team_size:
            raise ConfigurationError(
                f"num_agents ({num_agents}) must be divisible by team_size ({team_size})"
            )
        return cls(num_agents, [range(s, s + team_size) for s in range(0, num_agents, team_size)])

    def team_of(self, agent: int) -> int:
        for k, team in enumerate(self.teams):
            if agent in team:
                return k
        raise ConfigurationError(f"unknown agent id {agent}")


@dataclass(frozen=True)
class RewardLedger:
    """Environmental rewards of one timestep alongside their redistributed counterparts."""

    step_env_rewards: tuple[float, ...]
    step_credo_rewards: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.step_env_rewards) != len(self.step_credo_rewards):
            raise ConfigurationError("reward vectors differ in length")

    @property
    def conservation_error(self) -> float:
        return abs(sum(self.step_credo_rewards) - sum(self.step_env_rewards))


def _weights(credos: Sequence[CredoVector]) -> np.ndarray:
    return np.array([c.as_tuple() for c in credos], dtype=np.float64).reshape(-1, 3)


def team_pot(team: Iterable[int], credos: Sequence[CredoVector], env_rewards: Sequence[float]) -> float:
    total = 0.0
    for j in team:
        if not 0 <= j < len(credos) or j >= len(env_rewards):
            raise ConfigurationError(f"unknown agent id {j} in team")
        total += credos[j].phi * env_rewards[j]
    return total


def system_pot(credos: Sequence[CredoVector], env_rewards: Sequence[float]) -> float:
    if len(credos) != len(env_rewards):
        raise ConfigurationError(
            f"{len(credos)} credos but {len(env_rewards)} rewards"
        )
    return float(sum(c.omega * r for c, r in zip(credos, env_rewards)))


def redistribute(
    structure: TeamStructure, credos: Sequence[CredoVector], env_rewards: Sequence[float]
) -> np.ndarray:
    """Credo-based reward of every agent for one timestep.

    A channel whose credo weights sum to zero over its group contributes
    nothing; its pot is zero as well, so conservation still holds.
    """
    n = structure.num_agents
    if len(credos) != n or len(env_rewards) != n:
        raise ConfigurationError(
            f"expected {n} credos and rewards, got {len(credos)} and {len(env_rewards)}"
        )
    out = np.array([c.psi * r for c, r in zip(credos, env_rewards)], dtype=np.float64)
    for team in structure.teams:
        phi_sum = sum(credos[j].phi for j in team)
        if phi_sum > 0.0:
            pot = team_pot(team, credos, env_rewards)
            for i in team:
                out[i] += credos[i].phi / phi_sum * pot
    omega_sum = sum(c.omega for c in credos)
    if omega_sum > 0.0:
        pot = system_pot(credos, env_rewards)
        for i in range(n):
            out[i] += credos[i].omega / omega_sum * pot
    return out


def redistribution_matrix(structure: TeamStructure, credos: Sequence[CredoVector]) -> np.ndarray:
    """Matrix ``M`` with ``redistribute(structure, credos, R) == M @ R``.

    Redistribution is linear in the rewards, so for a fixed credo assignment
    the per-step work reduces to one matrix-vector product.
    """
    n = structure.num_agents
    if len(credos) != n:
        raise ConfigurationError(f"expected {n} credos, got {len(credos)}")
    w = _weights(credos)
    psi, phi, omega = w[:, 0], w[:, 1], w[:, 2]
    m = np.diag(psi)
    for team in structure.teams:
        idx = np.array(sorted(team))
        phi_sum = phi[idx].sum()
        if phi_sum > 0.0:
            m[np.ix_(idx, idx)] += np.outer(phi[idx] / phi_sum, phi[idx])
    omega_sum = omega.sum()
    if omega_sum > 0.0:
        m += np.outer(omega / omega_sum, omega)
    return m
