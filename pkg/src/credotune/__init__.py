"""Credo-based reward redistribution and credo-tuning agents for multi-agent RL."""

from credotune.credo_core import (
    CredoVector,
    RewardLedger,
    TeamStructure,
    redistribute,
    redistribution_matrix,
    system_pot,
    team_pot,
    validate_credo,
)

__all__ = [
    "CredoVector",
    "RewardLedger",
    "TeamStructure",
    "redistribute",
    "redistribution_matrix",
    "system_pot",
    "team_pot",
    "validate_credo",
]

__version__ = "0.1.0"
