"""Mean-pooled encoder and gated recurrent decoder with exact reverse-mode gradients.

Shapes: embeddings (V, d); encoder (d, d); gate input weights (d, 2d) over
[embedding of previous token; context]; recurrent weights (d, d). The decoder
state starts at the context vector.
"""

from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
from scipy.special import expit

TRUNK_KEYS = ("embed", "enc_w", "enc_b", "w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_n", "u_n", "b_n")


class ParamStore:
    """Named float64 arrays"""

    required: tuple = TRUNK_KEYS

    def __init__(self, arrays: Dict[str, np.ndarray]):
        missing = set(self.required) - set(arrays)
        if missing:
            raise ValueError(f"missing parameter arrays: {sorted(missing)}")
        self.arrays = {name: np.asarray(arrays[name], dtype=np.float64) for name in self.required}

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]

    def items(self):
        return self.arrays.items()

    @property
    def dim(self) -> int:
        return self.arrays["embed"].shape[1]

    @property
    def vocab_size(self) -> int:
        return self.arrays["embed"].shape[0]

    def copy(self):
        return type(self)({name: array.copy() for name, array in self.arrays.items()})

    def zeros_like(self) -> Dict[str, np.ndarray]:
        return {name: np.zeros_like(array) for name, array in self.arrays.items()}

    def is_finite(self) -> bool:
        return all(np.isfinite(array).all() for array in self.arrays.values())

    def freeze(self):
        for array in self.arrays.values():
            array.setflags(write=False)
        return self


def init_trunk(vocab_size: int, dim: int, rng: np.random.Generator, init_scale: float = 1.0) -> Dict[str, np.ndarray]:
    def matrix(rows, cols):
        return rng.normal(0.0, 1.0 / np.sqrt(cols), size=(rows, cols))

    return {
        "embed": rng.normal(0.0, init_scale, size=(vocab_size, dim)),
        "enc_w": matrix(dim, dim),
        "enc_b": np.zeros(dim),
        "w_z": matrix(dim, 2 * dim),
        "u_z": matrix(dim, dim),
        "b_z": np.zeros(dim),
        "w_r": matrix(dim, 2 * dim),
        "u_r": matrix(dim, dim),
        "b_r": np.zeros(dim),
        "w_n": matrix(dim, 2 * dim),
        "u_n": matrix(dim, dim),
        "b_n": np.zeros(dim),
    }


def encode(params: ParamStore, x: Sequence[int]):
    """Return (context, mean embedding)"""
    ids = np.asarray(x, dtype=np.int64)
    if ids.size == 0:
        raise ValueError("input ids must not be empty")
    if ids.min() < 0 or ids.max() >= params.vocab_size:
        raise ValueError(f"input id out of vocabulary range [0, {params.vocab_size})")
    mean_emb = params["embed"][ids].mean(axis=0)
    context = np.tanh(params["enc_w"] @ mean_emb + params["enc_b"])
    return context, mean_emb


def gru_step(params: ParamStore, context: np.ndarray, h: np.ndarray, prev_id: int):
    """One decoder step; returns (new state, gate activations)"""
    u = np.concatenate([params["embed"][prev_id], context])
    z = expit(params["w_z"] @ u + params["u_z"] @ h + params["b_z"])
    r = expit(params["w_r"] @ u + params["u_r"] @ h + params["b_r"])
    n = np.tanh(params["w_n"] @ u + params["u_n"] @ (r * h) + params["b_n"])
    h_new = (1.0 - z) * n + z * h
    return h_new, (u, z, r, n)


@dataclass
class DecoderCache:
    x: np.ndarray
    prev: np.ndarray
    mean_emb: np.ndarray
    context: np.ndarray
    inputs: np.ndarray
    h_prev: np.ndarray
    z: np.ndarray
    r: np.ndarray
    n: np.ndarray
    hidden: np.ndarray


def run_decoder(params: ParamStore, x: Sequence[int], prev: Sequence[int]) -> DecoderCache:
    """Teacher-forced decoder pass; hidden[t] represents state s_t"""
    context, mean_emb = encode(params, x)
    steps, dim = len(prev), params.dim
    inputs = np.zeros((steps, 2 * dim))
    h_prev, z, r, n, hidden = (np.zeros((steps, dim)) for _ in range(5))
    h = context
    for t, prev_id in enumerate(prev):
        h_prev[t] = h
        h, (inputs[t], z[t], r[t], n[t]) = gru_step(params, context, h, prev_id)
        hidden[t] = h
    return DecoderCache(
        x=np.asarray(x, dtype=np.int64),
        prev=np.asarray(prev, dtype=np.int64),
        mean_emb=mean_emb,
        context=context,
        inputs=inputs,
        h_prev=h_prev,
        z=z,
        r=r,
        n=n,
        hidden=hidden,
    )


def backprop_decoder(params: ParamStore, cache: DecoderCache, d_hidden: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradients of the trunk parameters given dLoss/dhidden"""
    grads = {name: np.zeros_like(params[name]) for name in TRUNK_KEYS}
    dim = params.dim
    d_context = np.zeros(dim)
    dh_next = np.zeros(dim)

    for t in reversed(range(len(cache.prev))):
        dh = d_hidden[t] + dh_next
        h, u = cache.h_prev[t], cache.inputs[t]
        z, r, n = cache.z[t], cache.r[t], cache.n[t]

        dn = dh * (1.0 - z)
        dz = dh * (h - n)
        dh_prev = dh * z

        da_n = dn * (1.0 - n * n)
        grads["w_n"] += np.outer(da_n, u)
        grads["u_n"] += np.outer(da_n, r * h)
        grads["b_n"] += da_n
        du = params["w_n"].T @ da_n
        d_rh = params["u_n"].T @ da_n
        dh_prev += d_rh * r

        da_r = d_rh * h * r * (1.0 - r)
        grads["w_r"] += np.outer(da_r, u)
        grads["u_r"] += np.outer(da_r, h)
        grads["b_r"] += da_r
        du += params["w_r"].T @ da_r
        dh_prev += params["u_r"].T @ da_r

        da_z = dz * z * (1.0 - z)
        grads["w_z"] += np.outer(da_z, u)
        grads["u_z"] += np.outer(da_z, h)
        grads["b_z"] += da_z
        du += params["w_z"].T @ da_z
        dh_prev += params["u_z"].T @ da_z

        grads["embed"][cache.prev[t]] += du[:dim]
        d_context += du[dim:]
        dh_next = dh_prev

    d_context += dh_next
    da = d_context * (1.0 - cache.context ** 2)
    grads["enc_w"] += np.outer(da, cache.mean_emb)
    grads["enc_b"] += da
    d_mean = params["enc_w"].T @ da
    np.add.at(grads["embed"], cache.x, d_mean / len(cache.x))
    return grads
