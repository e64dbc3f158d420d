import logging
from typing import Dict, Sequence, Tuple

import numpy as np

from ..errors import PolicyDivergenceError
from .network import ParamStore

logger = logging.getLogger(__name__)

Grads = Dict[str, np.ndarray]


def global_norm(grad_sets: Sequence[Grads]) -> float:
    return float(np.sqrt(sum(float(np.sum(g * g)) for grads in grad_sets for g in grads.values())))


class Adam:
    """Adaptive moment estimation over one or more parameter stores.

    Gradients of all stores are clipped together by their global norm before the
    update; a non-finite gradient or parameter raises ``PolicyDivergenceError``.
    """

    def __init__(
        self,
        stores: Sequence[ParamStore],
        lr: float = 0.01,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        max_grad_norm: float = 0.0,
    ):
        self.stores = list(stores)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.max_grad_norm = max_grad_norm
        self.steps = 0
        self._m = [store.zeros_like() for store in self.stores]
        self._v = [store.zeros_like() for store in self.stores]

    def step(self, grad_sets: Sequence[Grads]) -> float:
        """Apply one update; returns the gradient norm before clipping"""
        if len(grad_sets) != len(self.stores):
            raise ValueError(f"expected {len(self.stores)} gradient sets, got {len(grad_sets)}")
        norm = global_norm(grad_sets)
        if not np.isfinite(norm):
            raise PolicyDivergenceError("non-finite gradient norm")
        scale = 1.0
        if self.max_grad_norm > 0 and norm > self.max_grad_norm:
            scale = self.max_grad_norm / (norm + 1e-12)

        self.steps += 1
        correction1 = 1.0 - self.beta1 ** self.steps
        correction2 = 1.0 - self.beta2 ** self.steps
        for store, grads, m, v in zip(self.stores, grad_sets, self._m, self._v):
            for name, param in store.items():
                grad = grads.get(name)
                if grad is None:
                    continue
                grad = grad * scale
                m[name] = self.beta1 * m[name] + (1.0 - self.beta1) * grad
                v[name] = self.beta2 * v[name] + (1.0 - self.beta2) * grad * grad
                param -= self.lr * (m[name] / correction1) / (np.sqrt(v[name] / correction2) + self.eps)
            if not store.is_finite():
                raise PolicyDivergenceError(f"non-finite parameters after update {self.steps}")
        return norm
