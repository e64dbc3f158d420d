from dataclasses import dataclass

import numpy as np

from ..errors import PolicyDivergenceError


@dataclass
class PPOLosses:
    policy_loss: float
    value_loss: float
    total: float
    d_logprobs: np.ndarray
    d_values: np.ndarray
    clip_fraction: float


def ppo_losses(
    new_logprobs,
    old_logprobs,
    advantages,
    values,
    returns,
    clip_epsilon: float = 0.2,
    value_coef: float = 0.5,
) -> PPOLosses:
    """Clipped surrogate and squared value error over all steps of a minibatch.

    Gradients are of ``total`` with respect to the new log-probs and the values.
    """
    new = np.asarray(new_logprobs, dtype=np.float64)
    old = np.asarray(old_logprobs, dtype=np.float64)
    adv = np.asarray(advantages, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    ret = np.asarray(returns, dtype=np.float64)
    if not (new.shape == old.shape == adv.shape == v.shape == ret.shape):
        raise ValueError("ppo inputs must share one shape")
    steps = new.size
    if steps == 0:
        raise ValueError("ppo batch has no steps")

    with np.errstate(over="ignore"):
        ratio = np.exp(new - old)
    if not np.isfinite(ratio).all():
        raise PolicyDivergenceError("non-finite probability ratio")

    unclipped = ratio * adv
    clipped = np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * adv
    surrogate = np.minimum(unclipped, clipped)
    active = unclipped <= clipped

    policy_loss = -float(surrogate.mean())
    value_loss = float(np.mean((v - ret) ** 2))
    return PPOLosses(
        policy_loss=policy_loss,
        value_loss=value_loss,
        total=policy_loss + value_coef * value_loss,
        d_logprobs=np.where(active, -unclipped / steps, 0.0),
        d_values=value_coef * 2.0 * (v - ret) / steps,
        clip_fraction=float(np.mean(~active)),
    )


def normalize(advantages: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    if advantages.size < 2:
        return advantages - advantages.mean()
    return (advantages - advantages.mean()) / (advantages.std() + eps)
