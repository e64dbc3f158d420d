from typing import Tuple

import numpy as np


def gae(rewards, values, gamma: float = 1.0, lam: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates and value targets.

    ``values`` holds V(s_0)..V(s_T); the terminal entry is normally 0.
    Returns (advantages, returns) with returns = advantages + V(s_t).
    """
    r = np.asarray(rewards, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if v.shape != (r.size + 1,):
        raise ValueError(f"expected {r.size + 1} values for {r.size} rewards, got {v.size}")

    deltas = r + gamma * v[1:] - v[:-1]
    advantages = np.zeros_like(r)
    running = 0.0
    for t in reversed(range(r.size)):
        running = deltas[t] + gamma * lam * running
        advantages[t] = running
    return advantages, advantages + v[:-1]
