import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import TrainConfig
from ..errors import PolicyDivergenceError
from ..models import IterationLog, QASample, ScoreTriple
from ..policy import (
    Adam,
    DecodeMode,
    RewriterPolicy,
    init_value_from_policy,
    policy_backward,
    policy_forward,
    sample_sequence,
    save_checkpoint,
    snapshot,
    value_backward,
    value_forward,
)
from ..utils import write_jsonl
from .gae import gae
from .ppo import normalize, ppo_losses
from .rewards import RewardBreakdown, kl_per_step, shape_rewards

logger = logging.getLogger(__name__)

Env = Callable[[QASample, str], Tuple[float, ScoreTriple]]


@dataclass
class Trajectory:
    sample: QASample
    x: List[int]
    actions: List[int]
    logprobs: np.ndarray
    ref_logprobs: np.ndarray
    values: np.ndarray
    rewrite: str = ""
    r_lm: float = 0.0
    scores: Optional[ScoreTriple] = None
    kl: Optional[np.ndarray] = None
    rewards: Optional[np.ndarray] = None
    advantages: Optional[np.ndarray] = None
    returns: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return len(self.actions)

    def breakdown(self) -> RewardBreakdown:
        return RewardBreakdown(
            em=self.scores.em,
            f1=self.scores.f1,
            hit=self.scores.hit,
            r_lm=self.r_lm,
            kl=self.kl.tolist(),
            shaped=self.rewards.tolist(),
        )


@dataclass
class RolloutBatch:
    trajectories: List[Trajectory]
    skipped: int = 0

    def mean(self, values) -> float:
        values = list(values)
        return float(np.mean(values)) if values else 0.0


@dataclass
class PPOResult:
    policy: RewriterPolicy
    logs: List[IterationLog] = field(default_factory=list)


class PPOTrainer:
    """Clipped-objective policy optimisation of the rewriter against a pipeline reward"""

    def __init__(self, policy: RewriterPolicy, env: Env, dataset: Sequence[QASample], cfg: TrainConfig):
        if not dataset:
            raise ValueError("PPO training needs at least one sample")
        self.policy = policy.copy()
        self.reference = snapshot(self.policy.params)
        if self.policy.value is None:
            self.policy.value = init_value_from_policy(self.policy.params)
        self.env = env
        self.dataset = list(dataset)
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.optimizer = Adam(
            [self.policy.params, self.policy.value], lr=cfg.learning_rate, max_grad_norm=cfg.max_grad_norm
        )

    @property
    def bos_id(self) -> int:
        return self.policy.vocab.bos_id

    def _sample_batch(self) -> List[QASample]:
        size = self.cfg.rollout_batch_size
        replace = size > len(self.dataset)
        indices = self.rng.choice(len(self.dataset), size=size, replace=replace)
        return [self.dataset[i] for i in indices]

    def _reward(self, item: Tuple[QASample, str]):
        sample, rewrite = item
        try:
            return self.env(sample, rewrite)
        except Exception as e:
            logger.warning(f"Skipping sample {sample.id} this iteration: {e}")
            return None

    def collect_rollouts(self) -> RolloutBatch:
        vocab = self.policy.vocab
        trajectories = []
        for sample in self._sample_batch():
            x = vocab.encode(sample.pipeline_text)
            generation = sample_sequence(
                self.policy.params,
                x,
                eos_id=vocab.eos_id,
                bos_id=vocab.bos_id,
                max_len=self.policy.max_len,
                mode=DecodeMode.SAMPLE,
                rng=self.rng,
                value_params=self.policy.value,
            )
            ref_logprobs = policy_forward(self.reference, x, generation.ids, vocab.bos_id).action_logprobs
            trajectories.append(
                Trajectory(
                    sample=sample,
                    x=x,
                    actions=generation.ids,
                    logprobs=generation.logprobs,
                    ref_logprobs=ref_logprobs,
                    values=generation.values,
                    rewrite=vocab.decode(generation.ids),
                )
            )

        with ThreadPoolExecutor(max_workers=self.cfg.rollout_workers) as pool:
            outcomes = list(pool.map(self._reward, [(t.sample, t.rewrite) for t in trajectories]))

        kept = []
        for trajectory, outcome in zip(trajectories, outcomes):
            if outcome is None:
                continue
            trajectory.r_lm, trajectory.scores = outcome
            trajectory.kl = kl_per_step(trajectory.logprobs, trajectory.ref_logprobs)
            trajectory.rewards = shape_rewards(trajectory.r_lm, trajectory.kl, self.cfg.kl_beta)
            trajectory.advantages, trajectory.returns = gae(
                trajectory.rewards,
                np.append(trajectory.values, 0.0),
                gamma=self.cfg.gamma,
                lam=self.cfg.gae_lambda,
            )
            kept.append(trajectory)

        if kept and self.cfg.normalize_advantages:
            flat = normalize(np.concatenate([t.advantages for t in kept]))
            offsets = np.cumsum([0] + [t.length for t in kept])
            for trajectory, start, end in zip(kept, offsets[:-1], offsets[1:]):
                trajectory.advantages = flat[start:end]
        return RolloutBatch(trajectories=kept, skipped=len(trajectories) - len(kept))

    def update(self, minibatch: Sequence[Trajectory]):
        """One optimiser step on a minibatch; returns (policy loss, value loss)"""
        forwards = [policy_forward(self.policy.params, t.x, t.actions, self.bos_id) for t in minibatch]
        value_passes = [value_forward(self.policy.value, t.x, t.actions, self.bos_id) for t in minibatch]
        losses = ppo_losses(
            np.concatenate([f.action_logprobs for f in forwards]),
            np.concatenate([t.logprobs for t in minibatch]),
            np.concatenate([t.advantages for t in minibatch]),
            np.concatenate([values for _, values in value_passes]),
            np.concatenate([t.returns for t in minibatch]),
            clip_epsilon=self.cfg.clip_epsilon,
            value_coef=self.cfg.value_coef,
        )
        if not np.isfinite(losses.total):
            raise PolicyDivergenceError(f"non-finite PPO loss {losses.total}")

        policy_grads = self.policy.params.zeros_like()
        value_grads = self.policy.value.zeros_like()
        start = 0
        for trajectory, forward, (cache, _) in zip(minibatch, forwards, value_passes):
            end = start + trajectory.length
            for name, grad in policy_backward(self.policy.params, forward, losses.d_logprobs[start:end]).items():
                policy_grads[name] += grad
            for name, grad in value_backward(self.policy.value, cache, losses.d_values[start:end]).items():
                value_grads[name] += grad
            start = end
        self.optimizer.step([policy_grads, value_grads])
        return losses.policy_loss, losses.value_loss

    def iteration(self, number: int) -> IterationLog:
        batch = self.collect_rollouts()
        trajectories = batch.trajectories
        policy_losses, value_losses = [], []
        if trajectories:
            for _ in range(self.cfg.ppo_epochs):
                order = self.rng.permutation(len(trajectories))
                for start in range(0, len(order), self.cfg.minibatch_size):
                    minibatch = [trajectories[i] for i in order[start : start + self.cfg.minibatch_size]]
                    policy_loss, value_loss = self.update(minibatch)
                    policy_losses.append(policy_loss)
                    value_losses.append(value_loss)
        else:
            logger.warning(f"Iteration {number}: every rollout was skipped")

        return IterationLog(
            iter=number,
            mean_reward=batch.mean(t.r_lm for t in trajectories),
            mean_em=batch.mean(t.scores.em for t in trajectories),
            mean_f1=batch.mean(t.scores.f1 for t in trajectories),
            mean_kl=batch.mean(float(t.kl.sum()) for t in trajectories),
            policy_loss=batch.mean(policy_losses),
            value_loss=batch.mean(value_losses),
            skipped=batch.skipped,
        )

    def train(self, log_path=None, checkpoint_path=None) -> PPOResult:
        logs: List[IterationLog] = []
        for number in range(1, self.cfg.total_iterations + 1):
            try:
                entry = self.iteration(number)
            except PolicyDivergenceError as e:
                raise PolicyDivergenceError(f"iteration {number}: {e}") from e
            logs.append(entry)
            logger.info(
                f"Iteration {number}/{self.cfg.total_iterations} reward={entry.mean_reward:.4f} "
                f"kl={entry.mean_kl:.4f} policy_loss={entry.policy_loss:.4f} "
                f"value_loss={entry.value_loss:.4f} skipped={entry.skipped}"
            )
            if log_path is not None:
                write_jsonl(Path(log_path), (log.model_dump_json() for log in logs))
            if checkpoint_path is not None and self.cfg.checkpoint_every and number % self.cfg.checkpoint_every == 0:
                save_checkpoint(self.policy, f"{checkpoint_path}.iter{number}")
        return PPOResult(policy=self.policy, logs=logs)


def train_ppo(
    policy: RewriterPolicy,
    env: Env,
    dataset: Sequence[QASample],
    cfg: TrainConfig,
    log_path=None,
    checkpoint_path=None,
) -> PPOResult:
    return PPOTrainer(policy, env, dataset, cfg).train(log_path=log_path, checkpoint_path=checkpoint_path)
