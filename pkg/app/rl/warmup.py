import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..config import TrainConfig
from ..errors import PolicyDivergenceError
from ..models import PseudoPair
from ..policy import Adam, RewriterPolicy, policy_backward, policy_forward

logger = logging.getLogger(__name__)


@dataclass
class WarmupResult:
    policy: RewriterPolicy
    losses: List[float] = field(default_factory=list)


def pair_ids(policy: RewriterPolicy, pair: PseudoPair) -> Tuple[List[int], List[int]]:
    """(question ids, EOS-terminated rewrite ids truncated to max_len)"""
    target = policy.vocab.encode_target(pair.rewrite)[: policy.max_len]
    return policy.vocab.encode(pair.original_question), target


def _nll_and_grads(policy: RewriterPolicy, pairs: Sequence[PseudoPair], with_grads: bool):
    if not pairs:
        raise ValueError("warm-up needs at least one pseudo pair")
    total = 0.0
    grads = policy.params.zeros_like() if with_grads else None
    weight = 1.0 / len(pairs)
    for pair in pairs:
        x, y = pair_ids(policy, pair)
        forward = policy_forward(policy.params, x, y, policy.vocab.bos_id)
        total -= float(forward.action_logprobs.sum())
        if with_grads:
            for name, grad in policy_backward(policy.params, forward, np.full(len(y), -weight)).items():
                grads[name] += grad
    return total * weight, grads


def warmup_nll(policy: RewriterPolicy, pairs: Sequence[PseudoPair]) -> float:
    """Mean over pairs of the summed token NLL of the rewrite, EOS included"""
    return _nll_and_grads(policy, pairs, with_grads=False)[0]


def warmup_grads(policy: RewriterPolicy, pairs: Sequence[PseudoPair]):
    return _nll_and_grads(policy, pairs, with_grads=True)


def train_warmup(policy: RewriterPolicy, pairs: Sequence[PseudoPair], cfg: TrainConfig) -> WarmupResult:
    """Supervised training of the rewriter on pseudo pairs; the input policy is left untouched"""
    if not pairs:
        raise ValueError("warm-up needs at least one pseudo pair")
    trained = policy.copy()
    optimizer = Adam([trained.params], lr=cfg.warmup_lr, max_grad_norm=cfg.max_grad_norm)
    rng = np.random.default_rng(cfg.seed)
    pairs = list(pairs)
    losses = []

    for epoch in range(1, cfg.warmup_epochs + 1):
        order = rng.permutation(len(pairs))
        epoch_loss = 0.0
        for start in range(0, len(pairs), cfg.warmup_batch_size):
            batch = [pairs[i] for i in order[start : start + cfg.warmup_batch_size]]
            loss, grads = warmup_grads(trained, batch)
            if not np.isfinite(loss):
                raise PolicyDivergenceError(f"warm-up loss became {loss} at epoch {epoch}")
            epoch_loss += loss * len(batch)
            try:
                optimizer.step([grads])
            except PolicyDivergenceError as e:
                raise PolicyDivergenceError(f"warm-up epoch {epoch}: {e}") from e
        losses.append(epoch_loss / len(pairs))
        if epoch == 1 or epoch % 50 == 0 or epoch == cfg.warmup_epochs:
            logger.info(f"Warm-up epoch {epoch}/{cfg.warmup_epochs} nll={losses[-1]:.4f}")

    return WarmupResult(policy=trained, losses=losses)


def reproduction_rate(policy: RewriterPolicy, pairs: Sequence[PseudoPair]) -> float:
    """Fraction of pairs whose greedy rewrite equals the target exactly"""
    if not pairs:
        return 0.0
    hits = sum(policy.rewrite(pair.original_question) == " ".join(pair.rewrite.split()) for pair in pairs)
    return hits / len(pairs)
