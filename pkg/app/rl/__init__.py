from .gae import gae
from .ppo import PPOLosses, normalize, ppo_losses
from .rewards import RewardBreakdown, kl_per_step, shape_rewards, task_reward
from .trainer import Env, PPOResult, PPOTrainer, RolloutBatch, Trajectory, train_ppo
from .warmup import WarmupResult, reproduction_rate, train_warmup, warmup_nll

__all__ = [
    "Env",
    "PPOLosses",
    "PPOResult",
    "PPOTrainer",
    "RewardBreakdown",
    "RolloutBatch",
    "Trajectory",
    "WarmupResult",
    "gae",
    "kl_per_step",
    "normalize",
    "ppo_losses",
    "reproduction_rate",
    "shape_rewards",
    "task_reward",
    "train_ppo",
    "train_warmup",
    "warmup_nll",
]
