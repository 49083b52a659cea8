"""Dense float64 tensor with a paired gradient buffer and a reverse-mode tape.

Each operation in :mod:`cmcl.nn.ops` builds an output Tensor whose `_backward`
closure knows how to push the output gradient into its parents. `backward()`
on a scalar loss walks the recorded graph once in reverse topological order.
There is no graph compilation and no broadcasting cleverness: shapes are
whatever the op documented, and every backward is written by hand.
"""
from __future__ import annotations

import contextlib
from typing import Callable, Iterator, Sequence

import numpy as np

# Gradient recording is on by default; eval loops disable it to skip building
# closures that would never run.
_grad_enabled = True


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Disable tape recording inside the block (forward values unaffected)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    """Shape-carrying float64 array plus an optional same-shape grad buffer."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_backward", "_parents")

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self.grad: np.ndarray | None = np.zeros_like(self.data) if requires_grad else None
        self._backward: Callable[[], None] | None = None
        self._parents: tuple[Tensor, ...] = ()

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return self.data.item()

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad.fill(0.0)

    def accum_grad(self, g: np.ndarray) -> None:
        """Add `g` into this tensor's grad buffer, materializing it if needed."""
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64, copy=True)
        else:
            self.grad += g

    def backward(self) -> None:
        """Reverse-mode sweep from this scalar; accumulates into leaf grads."""
        if self.data.size != 1:
            raise ValueError(f"backward() needs a scalar, got shape {self.shape}")
        order = _toposort(self)
        self.accum_grad(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None:
                node._backward()
                # Interior buffers are dead after their closure runs; leaf
                # (requires_grad) buffers persist until the optimizer consumes
                # them. Dropping interiors keeps long training loops flat.
                if not node.requires_grad:
                    node.grad = None
                node._backward = None
                node._parents = ()

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Tensor{tag}(shape={self.shape}, requires_grad={self.requires_grad})"


def _toposort(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def make_node(data: np.ndarray, parents: Sequence[Tensor], backward: Callable[[], None]) -> Tensor:
    """Wrap an op result: records the tape edge only when grads can flow."""
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad or p._backward is not None for p in parents):
        out._parents = tuple(parents)
        out._backward = backward
    return out
