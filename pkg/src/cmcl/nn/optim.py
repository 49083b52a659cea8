"""Plain SGD over learning-rate groups with global gradient-norm clipping."""
from __future__ import annotations

import numpy as np

from .tensor import Tensor


class NonFiniteGradient(RuntimeError):
    """Raised when a parameter's gradient contains NaN or Inf."""


def sgd_step(groups: list[tuple[list[Tensor], float]], clip_norm: float | None = 5.0) -> None:
    """θ ← θ − lr_group · grad for every unfrozen parameter, then zero grads.

    A parameter is frozen iff its `requires_grad` flag is off; frozen tensors
    are left bitwise untouched (values and grads). The clip rescales all
    participating grads together when their global L2 norm exceeds
    `clip_norm`.
    """
    live: list[tuple[Tensor, float]] = []
    sq = 0.0
    for params, lr in groups:
        for t in params:
            if not t.requires_grad:
                continue
            g = t.grad
            if not np.all(np.isfinite(g)):
                raise NonFiniteGradient(f"non-finite gradient in {t.name or 'unnamed tensor'}")
            sq += float(np.dot(g.ravel(), g.ravel()))
            live.append((t, lr))
    norm = float(np.sqrt(sq))
    factor = clip_norm / norm if (clip_norm is not None and norm > clip_norm) else 1.0
    for t, lr in live:
        t.data -= (lr * factor) * t.grad
        t.grad.fill(0.0)
