from credotune.config import BanditConfig, CleanupConfig
from credotune.envs.bandit import CredoResponseBandit, bandit_batch_reward
from credotune.envs.base import EnvDescriptor, Environment, JointStep
from credotune.envs.cleanup import MiniCleanup


def make_env(config, num_agents: int) -> Environment:
    if isinstance(config, CleanupConfig):
        return MiniCleanup(config, num_agents)
    if isinstance(config, BanditConfig):
        return CredoResponseBandit(config, num_agents)
    raise TypeError(f"unknown environment config {type(config).__name__}")


__all__ = [
    "CredoResponseBandit",
    "EnvDescriptor",
    "Environment",
    "JointStep",
    "MiniCleanup",
    "bandit_batch_reward",
    "make_env",
]
