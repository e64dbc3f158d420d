from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..config import TrainConfig
from ..errors import RewardError
from ..models import ScoreTriple, TaskKind


@dataclass
class RewardBreakdown:
    em: float
    f1: float
    hit: Optional[int]
    r_lm: float
    kl: List[float] = field(default_factory=list)
    shaped: List[float] = field(default_factory=list)


def task_reward(scores: ScoreTriple, task_kind: TaskKind, cfg: TrainConfig) -> float:
    """Pipeline reward: EM plus weighted F1, plus the weighted hit indicator for open QA"""
    reward = scores.em + cfg.f1_coef * scores.f1
    if task_kind is TaskKind.MULTI_CHOICE:
        return float(reward)
    if scores.hit is None:
        raise RewardError("open-domain reward needs a retrieval hit indicator")
    return float(reward + cfg.hit_coef * scores.hit)


def kl_per_step(logprobs, ref_logprobs) -> np.ndarray:
    """Sampled-action estimate log pi(a_t|s_t) - log pi_0(a_t|s_t)"""
    current = np.asarray(logprobs, dtype=np.float64)
    reference = np.asarray(ref_logprobs, dtype=np.float64)
    if current.shape != reference.shape:
        raise ValueError(f"log-prob length mismatch: {current.shape} vs {reference.shape}")
    return current - reference


def shape_rewards(r_lm: float, kl, beta: float) -> np.ndarray:
    penalties = np.asarray(kl, dtype=np.float64)
    if penalties.size == 0:
        raise ValueError("episode must have at least one step")
    rewards = -beta * penalties
    rewards[-1] += r_lm
    return rewards
