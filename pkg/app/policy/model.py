import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.special import log_softmax

from ..errors import PolicyDivergenceError
from .network import (
    TRUNK_KEYS,
    DecoderCache,
    ParamStore,
    backprop_decoder,
    encode,
    gru_step,
    init_trunk,
    run_decoder,
)
from .vocab import Vocab

logger = logging.getLogger(__name__)


class PolicyParams(ParamStore):
    """Rewriter policy: trunk plus output projection (d, V)"""

    required = TRUNK_KEYS + ("out_w", "out_b")


class ValueParams(ParamStore):
    """Value network: its own trunk plus a scalar head"""

    required = TRUNK_KEYS + ("value_w", "value_b")


class DecodeMode(str, Enum):
    GREEDY = "greedy"
    SAMPLE = "sample"


def init_policy(vocab_size: int, dim: int, seed: int = 0, init_scale: float = 1.0, zero_output: bool = True) -> PolicyParams:
    rng = np.random.default_rng(seed)
    arrays = init_trunk(vocab_size, dim, rng, init_scale)
    if zero_output:
        arrays["out_w"] = np.zeros((dim, vocab_size))
    else:
        arrays["out_w"] = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(dim, vocab_size))
    arrays["out_b"] = np.zeros(vocab_size)
    return PolicyParams(arrays)


def snapshot(params: PolicyParams) -> PolicyParams:
    """Deep, read-only copy used as the reference policy"""
    return params.copy().freeze()


def init_value_from_policy(policy: PolicyParams) -> ValueParams:
    arrays = {name: policy[name].copy() for name in TRUNK_KEYS}
    arrays["value_w"] = np.zeros(policy.dim)
    arrays["value_b"] = np.zeros(1)
    return ValueParams(arrays)


def step_logits(params: PolicyParams, context: np.ndarray, state: np.ndarray, prev_id: int):
    """Logits over the vocabulary for the next token, and the next decoder state"""
    h_new, _ = gru_step(params, context, state, prev_id)
    return h_new @ params["out_w"] + params["out_b"], h_new


@dataclass
class Generation:
    ids: List[int]
    logprobs: np.ndarray
    values: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return len(self.ids)


def sample_sequence(
    params: PolicyParams,
    x: Sequence[int],
    eos_id: int,
    bos_id: int,
    max_len: int = 32,
    mode: DecodeMode = DecodeMode.GREEDY,
    rng: Optional[np.random.Generator] = None,
    value_params: Optional[ValueParams] = None,
) -> Generation:
    """Decode until EOS or max_len; log-probs are those of the emitted tokens"""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    if mode is DecodeMode.SAMPLE and rng is None:
        raise ValueError("categorical sampling needs a random generator")

    context, _ = encode(params, x)
    state, prev = context, bos_id
    ids, logprobs = [], []
    for _ in range(max_len):
        logits, state = step_logits(params, context, state, prev)
        step_logp = log_softmax(logits)
        if mode is DecodeMode.GREEDY:
            token = int(np.argmax(step_logp))
        else:
            cumulative = np.cumsum(np.exp(step_logp))
            token = min(int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right")), len(cumulative) - 1)
        ids.append(token)
        logprobs.append(step_logp[token])
        prev = token
        if token == eos_id:
            break

    values = value_forward(value_params, x, ids, bos_id)[1] if value_params is not None else None
    return Generation(ids=ids, logprobs=np.asarray(logprobs), values=values)


@dataclass
class PolicyForward:
    cache: DecoderCache
    actions: np.ndarray
    logprobs: np.ndarray

    @property
    def action_logprobs(self) -> np.ndarray:
        return self.logprobs[np.arange(len(self.actions)), self.actions]


def _shift_right(actions: Sequence[int], bos_id: int) -> List[int]:
    return [bos_id] + list(actions[:-1])


def policy_forward(params: PolicyParams, x: Sequence[int], actions: Sequence[int], bos_id: int) -> PolicyForward:
    cache = run_decoder(params, x, _shift_right(actions, bos_id))
    logits = cache.hidden @ params["out_w"] + params["out_b"]
    if not np.isfinite(logits).all():
        raise PolicyDivergenceError("non-finite logits in policy forward pass")
    return PolicyForward(cache=cache, actions=np.asarray(actions, dtype=np.int64), logprobs=log_softmax(logits, axis=1))


def sequence_logprob(params: PolicyParams, x: Sequence[int], y: Sequence[int], vocab: Vocab, max_len: int = 32) -> np.ndarray:
    """Teacher-forced log-probs of each target token"""
    if not y:
        raise ValueError("target must not be empty")
    if len(y) > max_len:
        raise ValueError(f"target length {len(y)} exceeds max_len {max_len}")
    if y[-1] != vocab.eos_id and len(y) < max_len:
        raise ValueError("target must end with EOS unless truncated at max_len")
    return policy_forward(params, x, y, vocab.bos_id).action_logprobs


def policy_backward(params: PolicyParams, forward: PolicyForward, d_action_logprobs: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradients of every policy array given dLoss/dlog pi(a_t|s_t)"""
    probs = np.exp(forward.logprobs)
    d_logits = -d_action_logprobs[:, None] * probs
    d_logits[np.arange(len(forward.actions)), forward.actions] += d_action_logprobs
    grads = backprop_decoder(params, forward.cache, d_logits @ params["out_w"].T)
    grads["out_w"] = forward.cache.hidden.T @ d_logits
    grads["out_b"] = d_logits.sum(axis=0)
    return grads


def value_forward(params: ValueParams, x: Sequence[int], actions: Sequence[int], bos_id: int):
    """Return (cache, V(s_t) for each step)"""
    cache = run_decoder(params, x, _shift_right(actions, bos_id))
    values = cache.hidden @ params["value_w"] + params["value_b"][0]
    if not np.isfinite(values).all():
        raise PolicyDivergenceError("non-finite values in value forward pass")
    return cache, values


def value_backward(params: ValueParams, cache: DecoderCache, d_values: np.ndarray) -> Dict[str, np.ndarray]:
    grads = backprop_decoder(params, cache, np.outer(d_values, params["value_w"]))
    grads["value_w"] = cache.hidden.T @ d_values
    grads["value_b"] = np.array([d_values.sum()])
    return grads


class RewriterPolicy:
    """Vocabulary, policy and optional value parameters of the trainable rewriter"""

    def __init__(self, vocab: Vocab, params: PolicyParams, max_len: int = 32, value: Optional[ValueParams] = None):
        if params.vocab_size != len(vocab):
            raise ValueError(f"policy has {params.vocab_size} embeddings for a vocabulary of {len(vocab)}")
        self.vocab = vocab
        self.params = params
        self.max_len = max_len
        self.value = value

    @classmethod
    def create(cls, vocab: Vocab, dim: int, max_len: int = 32, seed: int = 0, init_scale: float = 1.0):
        return cls(vocab, init_policy(len(vocab), dim, seed=seed, init_scale=init_scale), max_len=max_len)

    def generate(self, question: str, mode: DecodeMode = DecodeMode.GREEDY, rng=None, params=None) -> Generation:
        return sample_sequence(
            params or self.params,
            self.vocab.encode(question),
            eos_id=self.vocab.eos_id,
            bos_id=self.vocab.bos_id,
            max_len=self.max_len,
            mode=mode,
            rng=rng,
            value_params=self.value,
        )

    def rewrite(self, question: str) -> str:
        return self.vocab.decode(self.generate(question).ids)

    def copy(self):
        value = self.value.copy() if self.value is not None else None
        return RewriterPolicy(self.vocab, self.params.copy(), self.max_len, value)
