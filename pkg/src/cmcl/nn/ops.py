"""Forward/backward implementations for every operation the model needs.

Conventions:
  * vectors are 1-D arrays, sequences are (n, dim) row-major matrices;
  * LSTM gate blocks are stacked along the first axis of `W_x`/`W_h`/`b`
    in the fixed order (input, forget, cell, output), each block `h` wide;
  * every op validates shapes up front and raises ValueError on mismatch,
    IndexError on bad ids.

The recurrent ops come in two flavors: `lstm_cell` is the single-step
contract (used directly by tests and gradient checks), `lstm_run` scans a
whole sequence in one tape node with a fused BPTT backward. Both share the
same gate math, so checking one checks the other's arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Tensor, make_node


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Split form avoids exp overflow for large-magnitude inputs.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _push(t: Tensor, g: np.ndarray) -> None:
    """Accumulate a gradient contribution into a parent that participates."""
    if t.requires_grad or t._backward is not None:
        t.accum_grad(g)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass
class LstmCellParams:
    """Gate parameters for one LSTM direction: W_x (4h, d), W_h (4h, h), b (4h,)."""

    W_x: Tensor
    W_h: Tensor
    b: Tensor

    def __post_init__(self) -> None:
        fourh, d = self.W_x.shape
        if fourh % 4 != 0:
            raise ValueError(f"gate axis {fourh} not divisible by 4")
        h = fourh // 4
        if self.W_h.shape != (fourh, h) or self.b.shape != (fourh,):
            raise ValueError(
                f"inconsistent LSTM params: W_x {self.W_x.shape}, "
                f"W_h {self.W_h.shape}, b {self.b.shape}"
            )

    @property
    def hidden_size(self) -> int:
        return self.W_x.shape[0] // 4

    @property
    def input_size(self) -> int:
        return self.W_x.shape[1]

    def tensors(self) -> list[Tensor]:
        return [self.W_x, self.W_h, self.b]


def glorot(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    """Uniform Glorot draw for a 2-D weight."""
    fan_out, fan_in = shape
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_lstm_params(d: int, h: int, rng: np.random.Generator, name: str = "lstm") -> LstmCellParams:
    """Glorot gate matrices, zero bias except the forget block at 1.0."""
    b = np.zeros(4 * h)
    b[h : 2 * h] = 1.0
    return LstmCellParams(
        W_x=Tensor(glorot(rng, (4 * h, d)), requires_grad=True, name=f"{name}.W_x"),
        W_h=Tensor(glorot(rng, (4 * h, h)), requires_grad=True, name=f"{name}.W_h"),
        b=Tensor(b, requires_grad=True, name=f"{name}.b"),
    )


# ---------------------------------------------------------------------------
# elementary ops
# ---------------------------------------------------------------------------

def embed_lookup(E: Tensor, ids) -> Tensor:
    """Gather rows of E; backward scatter-adds into E.grad (repeats accumulate)."""
    idx = np.asarray(ids, dtype=np.intp)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError("ids must be a non-empty 1-D sequence")
    if idx.min() < 0 or idx.max() >= E.shape[0]:
        raise IndexError(f"id out of range for vocab of {E.shape[0]}")
    out_data = E.data[idx]

    def backward() -> None:
        if E.requires_grad:
            np.add.at(E.grad, idx, out.grad)

    out = make_node(out_data, (E,), backward)
    return out


def affine(W: Tensor, b: Tensor, x: Tensor) -> Tensor:
    """W x + b for a vector x, or row-wise X W^T + b for a (n, m) matrix."""
    k, m = W.shape
    if b.shape != (k,):
        raise ValueError(f"bias shape {b.shape} != ({k},)")
    if x.data.ndim == 1:
        if x.shape != (m,):
            raise ValueError(f"input shape {x.shape} incompatible with W {W.shape}")
        out_data = W.data @ x.data + b.data

        def backward() -> None:
            g = out.grad
            if W.requires_grad:
                W.grad += np.outer(g, x.data)
            if b.requires_grad:
                b.grad += g
            _push(x, W.data.T @ g)

    else:
        if x.data.ndim != 2 or x.shape[1] != m:
            raise ValueError(f"input shape {x.shape} incompatible with W {W.shape}")
        out_data = x.data @ W.data.T + b.data

        def backward() -> None:
            g = out.grad
            if W.requires_grad:
                W.grad += g.T @ x.data
            if b.requires_grad:
                b.grad += g.sum(axis=0)
            _push(x, g @ W.data)

    out = make_node(out_data, (W, b, x), backward)
    return out


def dropout(X: Tensor, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout while training; identity in eval mode."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return X
    keep = (rng.random(X.shape) >= rate)
    scale = 1.0 / (1.0 - rate)
    mask = keep * scale

    def backward() -> None:
        _push(X, out.grad * mask)

    out = make_node(X.data * mask, (X,), backward)
    return out


def maxpool_time(H: Tensor) -> Tensor:
    """Column-wise max over rows; ties resolve to the earliest row."""
    if H.data.ndim != 2 or H.shape[0] == 0:
        raise ValueError(f"need a non-empty (n, k) matrix, got {H.shape}")
    am = np.argmax(H.data, axis=0)
    cols = np.arange(H.shape[1])
    out_data = H.data[am, cols]

    def backward() -> None:
        g = np.zeros_like(H.data)
        g[am, cols] = out.grad
        _push(H, g)

    out = make_node(out_data, (H,), backward)
    return out


def avgpool_time(H: Tensor) -> Tensor:
    """Column-wise mean over rows; backward spreads grad by 1/n."""
    if H.data.ndim != 2 or H.shape[0] == 0:
        raise ValueError(f"need a non-empty (n, k) matrix, got {H.shape}")
    n = H.shape[0]
    out_data = H.data.mean(axis=0)

    def backward() -> None:
        _push(H, np.tile(out.grad / n, (n, 1)))

    out = make_node(out_data, (H,), backward)
    return out


def concat_vec(parts: list[Tensor]) -> Tensor:
    """Concatenate 1-D tensors; backward splits the grad back."""
    sizes = [p.data.shape[0] for p in parts]
    out_data = np.concatenate([p.data for p in parts])

    def backward() -> None:
        off = 0
        for p, s in zip(parts, sizes):
            _push(p, out.grad[off : off + s])
            off += s

    out = make_node(out_data, tuple(parts), backward)
    return out


def concat_cols(a: Tensor, b: Tensor) -> Tensor:
    """Column-concatenate two (n, *) matrices."""
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row mismatch {a.shape} vs {b.shape}")
    p = a.shape[1]
    out_data = np.concatenate([a.data, b.data], axis=1)

    def backward() -> None:
        _push(a, out.grad[:, :p])
        _push(b, out.grad[:, p:])

    out = make_node(out_data, (a, b), backward)
    return out


def flip_rows(a: Tensor) -> Tensor:
    """Reverse row order."""

    def backward() -> None:
        _push(a, out.grad[::-1])

    out = make_node(a.data[::-1].copy(), (a,), backward)
    return out


def row(a: Tensor, i: int) -> Tensor:
    """Select row i of a matrix as a vector."""

    def backward() -> None:
        g = np.zeros_like(a.data)
        g[i] = out.grad
        _push(a, g)

    out = make_node(a.data[i].copy(), (a,), backward)
    return out


def addn(parts: list[Tensor]) -> Tensor:
    """Elementwise sum of same-shape tensors (used to pool batch losses)."""
    out_data = parts[0].data.copy()
    for p in parts[1:]:
        out_data = out_data + p.data

    def backward() -> None:
        for p in parts:
            _push(p, out.grad)

    out = make_node(out_data, tuple(parts), backward)
    return out


def scale(a: Tensor, s: float) -> Tensor:
    """Multiply by a python scalar."""

    def backward() -> None:
        _push(a, out.grad * s)

    out = make_node(a.data * s, (a,), backward)
    return out


# ---------------------------------------------------------------------------
# softmax cross-entropy
# ---------------------------------------------------------------------------

def softmax_xent(logits: Tensor, target: int) -> tuple[np.ndarray, Tensor]:
    """Max-shifted softmax + CE loss; backward emits probs - onehot(target)."""
    z = logits.data
    if z.ndim != 1:
        raise ValueError(f"logits must be a vector, got {logits.shape}")
    k = z.shape[0]
    if not 0 <= target < k:
        raise IndexError(f"target {target} out of range for {k} classes")
    zs = z - z.max()
    e = np.exp(zs)
    probs = e / e.sum()
    loss_val = -(zs[target] - np.log(e.sum()))

    def backward() -> None:
        g = probs.copy()
        g[target] -= 1.0
        _push(logits, g * loss.grad)

    loss = make_node(np.asarray(loss_val), (logits,), backward)
    return probs, loss


def softmax_xent_rows(logits: Tensor, targets) -> tuple[np.ndarray, Tensor]:
    """Per-row softmax CE, summed over rows (callers divide by their count)."""
    z = logits.data
    t = np.asarray(targets, dtype=np.intp)
    if z.ndim != 2 or t.shape != (z.shape[0],):
        raise ValueError(f"logits {logits.shape} / targets {t.shape} mismatch")
    if t.size and (t.min() < 0 or t.max() >= z.shape[1]):
        raise IndexError(f"target out of range for {z.shape[1]} classes")
    zs = z - z.max(axis=1, keepdims=True)
    e = np.exp(zs)
    denom = e.sum(axis=1, keepdims=True)
    probs = e / denom
    rows = np.arange(z.shape[0])
    loss_val = -(zs[rows, t] - np.log(denom[:, 0])).sum()

    def backward() -> None:
        g = probs.copy()
        g[rows, t] -= 1.0
        _push(logits, g * loss.grad)

    loss = make_node(np.asarray(loss_val), (logits,), backward)
    return probs, loss


# ---------------------------------------------------------------------------
# LSTM
# ---------------------------------------------------------------------------

def lstm_cell(x: Tensor, h_prev: Tensor, c_prev: Tensor, p: LstmCellParams) -> tuple[Tensor, Tensor]:
    """One step: i=σ, f=σ, g=tanh, o=σ over W_x x + W_h h_prev + b;
    c = f⊙c_prev + i⊙g; h = o⊙tanh(c)."""
    h = p.hidden_size
    if x.shape != (p.input_size,) or h_prev.shape != (h,) or c_prev.shape != (h,):
        raise ValueError(
            f"cell inputs x {x.shape}, h_prev {h_prev.shape}, c_prev {c_prev.shape} "
            f"do not match params (d={p.input_size}, h={h})"
        )
    pre = p.W_x.data @ x.data + p.W_h.data @ h_prev.data + p.b.data
    gi = _sigmoid(pre[:h])
    gf = _sigmoid(pre[h : 2 * h])
    gg = np.tanh(pre[2 * h : 3 * h])
    go = _sigmoid(pre[3 * h :])
    c_data = gf * c_prev.data + gi * gg
    tanh_c = np.tanh(c_data)
    h_data = go * tanh_c

    def push_pre(dpre: np.ndarray, lo: int, hi: int) -> None:
        # Route a gradient on pre[lo:hi] into x, h_prev and the parameter blocks.
        if p.W_x.requires_grad:
            p.W_x.grad[lo:hi] += np.outer(dpre, x.data)
        if p.W_h.requires_grad:
            p.W_h.grad[lo:hi] += np.outer(dpre, h_prev.data)
        if p.b.requires_grad:
            p.b.grad[lo:hi] += dpre
        _push(x, p.W_x.data[lo:hi].T @ dpre)
        _push(h_prev, p.W_h.data[lo:hi].T @ dpre)

    def backward_c() -> None:
        dc = c_t.grad  # external + the h-path contribution pushed below
        dpre_ifg = np.concatenate([
            (dc * gg) * gi * (1.0 - gi),
            (dc * c_prev.data) * gf * (1.0 - gf),
            (dc * gi) * (1.0 - gg * gg),
        ])
        push_pre(dpre_ifg, 0, 3 * h)
        _push(c_prev, dc * gf)

    def backward_h() -> None:
        dh = h_t.grad
        _push(c_t, dh * go * (1.0 - tanh_c * tanh_c))
        push_pre((dh * tanh_c) * go * (1.0 - go), 3 * h, 4 * h)

    c_t = make_node(c_data, (x, h_prev, c_prev, p.W_x, p.W_h, p.b), backward_c)
    h_t = make_node(h_data, (c_t, x, h_prev, p.W_x, p.W_h, p.b), backward_h)
    return h_t, c_t


def lstm_run(X: Tensor, p: LstmCellParams, reverse: bool = False) -> Tensor:
    """Scan a (n, d) sequence from zero states; returns (n, h) hidden states in
    scan order (row s is the state after consuming the s-th scanned input), so
    the terminal state is the last row for either direction. Backward is a
    fused BPTT pass over the cached gate activations."""
    n, d = X.shape
    if n == 0:
        raise ValueError("empty sequence")
    if d != p.input_size:
        raise ValueError(f"input width {d} != param d {p.input_size}")
    h = p.hidden_size
    order = np.arange(n - 1, -1, -1, dtype=np.intp) if reverse else np.arange(n, dtype=np.intp)
    Xs = X.data[order]
    pre_x = Xs @ p.W_x.data.T + p.b.data  # (n, 4h)
    Wh = p.W_h.data

    S = np.empty((n, h))
    GI = np.empty((n, h)); GF = np.empty((n, h)); GG = np.empty((n, h)); GO = np.empty((n, h))
    TC = np.empty((n, h)); Hprev = np.empty((n, h)); Cprev = np.empty((n, h))
    h_t = np.zeros(h)
    c_t = np.zeros(h)
    for s in range(n):
        pre = pre_x[s] + Wh @ h_t
        gi = _sigmoid(pre[:h])
        gf = _sigmoid(pre[h : 2 * h])
        gg = np.tanh(pre[2 * h : 3 * h])
        go = _sigmoid(pre[3 * h :])
        Hprev[s] = h_t
        Cprev[s] = c_t
        c_t = gf * c_t + gi * gg
        tc = np.tanh(c_t)
        h_t = go * tc
        GI[s] = gi; GF[s] = gf; GG[s] = gg; GO[s] = go; TC[s] = tc
        S[s] = h_t

    def backward() -> None:
        dS = out.grad
        dgates = np.empty((n, 4 * h))
        dh = np.zeros(h)
        dc = np.zeros(h)
        for s in range(n - 1, -1, -1):
            dh = dh + dS[s]
            dcs = dc + dh * GO[s] * (1.0 - TC[s] * TC[s])
            dgates[s, :h] = (dcs * GG[s]) * GI[s] * (1.0 - GI[s])
            dgates[s, h : 2 * h] = (dcs * Cprev[s]) * GF[s] * (1.0 - GF[s])
            dgates[s, 2 * h : 3 * h] = (dcs * GI[s]) * (1.0 - GG[s] * GG[s])
            dgates[s, 3 * h :] = (dh * TC[s]) * GO[s] * (1.0 - GO[s])
            dh = Wh.T @ dgates[s]
            dc = dcs * GF[s]
        if p.W_x.requires_grad:
            p.W_x.grad += dgates.T @ Xs
        if p.W_h.requires_grad:
            p.W_h.grad += dgates.T @ Hprev
        if p.b.requires_grad:
            p.b.grad += dgates.sum(axis=0)
        if X.requires_grad or X._backward is not None:
            dX = np.empty_like(X.data)
            dX[order] = dgates @ p.W_x.data
            X.accum_grad(dX)

    out = make_node(S, (X, p.W_x, p.W_h, p.b), backward)
    return out


def bilstm_forward(X: Tensor, fwd: LstmCellParams, bwd: LstmCellParams) -> tuple[Tensor, Tensor]:
    """Bidirectional layer: H[i] = concat(forward state at i, backward state
    at i); H_N = concat(forward terminal, backward terminal), i.e. the states
    at the two sequence ends."""
    n = X.shape[0]
    s_f = lstm_run(X, fwd, reverse=False)
    s_b = lstm_run(X, bwd, reverse=True)
    H = concat_cols(s_f, flip_rows(s_b))
    H_N = concat_vec([row(s_f, n - 1), row(s_b, n - 1)])
    return H, H_N
