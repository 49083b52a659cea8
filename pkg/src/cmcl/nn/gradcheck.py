"""Central-difference gradient checking for the hand-written backward passes."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: Sequence[Tensor],
    eps: float = 1e-5,
) -> float:
    """Max relative error between analytic and numeric grads of `loss_fn`.

    `loss_fn` must rebuild the forward graph from the current parameter values
    on every call and be deterministic (fix any rng it consumes). Relative
    error is |a − n| / max(|a|, |n|, 1e-8) per element.
    """
    for p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = [p.grad.copy() for p in params]

    worst = 0.0
    for p, a in zip(params, analytic):
        flat = p.data.ravel()
        aflat = a.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            lp = loss_fn().item()
            flat[i] = orig - eps
            lm = loss_fn().item()
            flat[i] = orig
            numeric = (lp - lm) / (2.0 * eps)
            rel = abs(aflat[i] - numeric) / max(abs(aflat[i]), abs(numeric), 1e-8)
            worst = max(worst, rel)
    for p in params:
        p.zero_grad()
    return worst
