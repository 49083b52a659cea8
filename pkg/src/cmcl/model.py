"""The hierarchical model: embedding → BiLSTM-1 (tagging heads) → BiLSTM-2
(LM + sentiment heads), plus parameter grouping and checkpoint I/O.

Layer-1 states feed the POS and language-ID heads per position; layer-2
terminal states feed the next-subword LM head; the sentiment head reads the
concatenation of the layer-2 terminal state with max- and avg-pooling over
all layer-2 states. Dropout sits between the two LSTM layers only, and the
tagging heads always read clean (undropped) layer-1 states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus.data import EncodedSample
from .corpus.vocab import BOS_ID
from .nn.ops import (
    LstmCellParams,
    addn,
    affine,
    avgpool_time,
    bilstm_forward,
    concat_vec,
    dropout,
    embed_lookup,
    glorot,
    init_lstm_params,
    maxpool_time,
    scale,
    softmax_xent,
    softmax_xent_rows,
)
from .nn.rng import RngState
from .nn.tensor import Tensor, no_grad

GROUP_NAMES = ("embedding", "lstm1", "lstm2", "heads")
HEAD_NAMES = ("pos", "lang", "lm", "sentiment")
TASKS = ("lang", "pos", "pos+lang", "lm", "sentiment")

CHECKPOINT_MAGIC = "CMCL1"


@dataclass
class HierModel:
    E: Tensor
    lstm1_fwd: LstmCellParams
    lstm1_bwd: LstmCellParams
    lstm2_fwd: LstmCellParams
    lstm2_bwd: LstmCellParams
    W_pos: Tensor
    b_pos: Tensor
    W_lang: Tensor
    b_lang: Tensor
    W_lm: Tensor
    b_lm: Tensor
    W_sentiment: Tensor
    b_sentiment: Tensor
    dropout_rate: float = 0.2

    @property
    def vocab_size(self) -> int:
        return self.E.shape[0]

    @property
    def emb_dim(self) -> int:
        return self.E.shape[1]

    @property
    def hidden(self) -> int:
        return self.lstm1_fwd.hidden_size

    def named_tensors(self) -> list[tuple[str, Tensor]]:
        """Every learnable tensor once, in fixed depth order."""
        out: list[tuple[str, Tensor]] = [("E", self.E)]
        for label, params in (
            ("lstm1_fwd", self.lstm1_fwd),
            ("lstm1_bwd", self.lstm1_bwd),
            ("lstm2_fwd", self.lstm2_fwd),
            ("lstm2_bwd", self.lstm2_bwd),
        ):
            out += [(f"{label}.W_x", params.W_x), (f"{label}.W_h", params.W_h), (f"{label}.b", params.b)]
        out += [
            ("W_pos", self.W_pos), ("b_pos", self.b_pos),
            ("W_lang", self.W_lang), ("b_lang", self.b_lang),
            ("W_lm", self.W_lm), ("b_lm", self.b_lm),
            ("W_sentiment", self.W_sentiment), ("b_sentiment", self.b_sentiment),
        ]
        return out

    def num_params(self) -> int:
        return sum(t.data.size for _, t in self.named_tensors())


def head_tensors(m: HierModel, head: str) -> list[Tensor]:
    return {
        "pos": [m.W_pos, m.b_pos],
        "lang": [m.W_lang, m.b_lang],
        "lm": [m.W_lm, m.b_lm],
        "sentiment": [m.W_sentiment, m.b_sentiment],
    }[head]


def param_groups(m: HierModel, active_heads: tuple[str, ...] | None = None) -> list[list[Tensor]]:
    """The four transfer-learning groups, deepest first:
    [embedding, lstm1, lstm2, heads]. `active_heads` narrows the heads group
    to the named task heads (default: all four)."""
    heads: list[Tensor] = []
    for name in active_heads if active_heads is not None else HEAD_NAMES:
        heads += head_tensors(m, name)
    return [
        [m.E],
        m.lstm1_fwd.tensors() + m.lstm1_bwd.tensors(),
        m.lstm2_fwd.tensors() + m.lstm2_bwd.tensors(),
        heads,
    ]


def set_unfrozen(m: HierModel, unfrozen: set[int]) -> None:
    """Freeze/unfreeze whole groups by index into GROUP_NAMES."""
    for gi, group in enumerate(param_groups(m)):
        for t in group:
            t.requires_grad = gi in unfrozen
            if t.requires_grad and t.grad is None:
                t.grad = np.zeros_like(t.data)


def init_model(
    vocab_size: int,
    tagset_sizes: tuple[int, int],
    seed: int | RngState,
    emb_dim: int = 64,
    hidden: int = 64,
    dropout_rate: float = 0.2,
) -> HierModel:
    """Deterministic Glorot init. `tagset_sizes` is (n_lang_tags, n_pos_tags)."""
    n_lang, n_pos = tagset_sizes
    if min(vocab_size, n_lang, n_pos, emb_dim, hidden) < 1:
        raise ValueError("all sizes must be >= 1")
    state = seed if isinstance(seed, RngState) else RngState(seed)
    gen = state.generator()
    two_h = 2 * hidden

    def linear(k: int, m_: int, name: str) -> tuple[Tensor, Tensor]:
        W = Tensor(glorot(gen, (k, m_)), requires_grad=True, name=f"W_{name}")
        b = Tensor(np.zeros(k), requires_grad=True, name=f"b_{name}")
        return W, b

    E = Tensor(glorot(gen, (vocab_size, emb_dim)), requires_grad=True, name="E")
    lstm1_fwd = init_lstm_params(emb_dim, hidden, gen, "lstm1_fwd")
    lstm1_bwd = init_lstm_params(emb_dim, hidden, gen, "lstm1_bwd")
    lstm2_fwd = init_lstm_params(two_h, hidden, gen, "lstm2_fwd")
    lstm2_bwd = init_lstm_params(two_h, hidden, gen, "lstm2_bwd")
    W_pos, b_pos = linear(n_pos, two_h, "pos")
    W_lang, b_lang = linear(n_lang, two_h, "lang")
    W_lm, b_lm = linear(vocab_size, two_h, "lm")
    W_sent, b_sent = linear(3, 3 * two_h, "sentiment")
    return HierModel(
        E, lstm1_fwd, lstm1_bwd, lstm2_fwd, lstm2_bwd,
        W_pos, b_pos, W_lang, b_lang, W_lm, b_lm, W_sent, b_sent,
        dropout_rate=dropout_rate,
    )


# ---------------------------------------------------------------------------
# forward passes
# ---------------------------------------------------------------------------

@dataclass
class BiLstmTrace:
    """Per-layer concatenated states kept around for inspection/tests."""

    H1: Tensor
    H1_N: Tensor
    H2: Tensor | None = None
    H2_N: Tensor | None = None
    H_S: Tensor | None = None


def _softmax_np(z: np.ndarray) -> np.ndarray:
    zs = z - z.max(axis=-1, keepdims=True)
    e = np.exp(zs)
    return e / e.sum(axis=-1, keepdims=True)


def _layer1(m: HierModel, ids) -> tuple[Tensor, Tensor]:
    X = embed_lookup(m.E, ids)
    return bilstm_forward(X, m.lstm1_fwd, m.lstm1_bwd)


def _layer2(
    m: HierModel, H1: Tensor, training: bool, rng: np.random.Generator | None
) -> tuple[Tensor, Tensor]:
    if training and m.dropout_rate > 0.0 and rng is None:
        raise ValueError("training forward through layer 2 needs an rng for dropout")
    H1d = dropout(H1, m.dropout_rate, rng, training)
    return bilstm_forward(H1d, m.lstm2_fwd, m.lstm2_bwd)


def tagging_logits(m: HierModel, sample: EncodedSample) -> tuple[Tensor, Tensor, BiLstmTrace]:
    """Per-position logits for both tagging heads (shared layer-1 pass)."""
    H1, H1_N = _layer1(m, sample.subword_ids)
    return affine(m.W_pos, m.b_pos, H1), affine(m.W_lang, m.b_lang, H1), BiLstmTrace(H1, H1_N)


def forward_tagging(
    m: HierModel, sample: EncodedSample, training: bool = False
) -> tuple[np.ndarray, np.ndarray, BiLstmTrace]:
    """Per-position POS and language distributions from layer-1 states."""
    pos_logits, lang_logits, trace = tagging_logits(m, sample)
    return _softmax_np(pos_logits.data), _softmax_np(lang_logits.data), trace


def lm_logits_from_ids(
    m: HierModel, input_ids, training: bool, rng: np.random.Generator | None = None
) -> tuple[Tensor, BiLstmTrace]:
    """Next-subword logits for a BOS-prefixed id sequence."""
    H1, H1_N = _layer1(m, input_ids)
    H2, H2_N = _layer2(m, H1, training, rng)
    return affine(m.W_lm, m.b_lm, H2_N), BiLstmTrace(H1, H1_N, H2, H2_N)


def forward_lm(
    m: HierModel,
    prefix_sample: EncodedSample,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, BiLstmTrace]:
    """Distribution over the subword vocabulary for the next subword after
    the sample's ids; BOS is prepended so a length-1 prefix is still valid."""
    if not prefix_sample.subword_ids:
        raise ValueError("empty prefix")
    logits, trace = lm_logits_from_ids(m, [BOS_ID] + list(prefix_sample.subword_ids), training, rng)
    return _softmax_np(logits.data), trace


def make_lm_examples(
    sample: EncodedSample, k_prefixes: int, rng: np.random.Generator
) -> list[tuple[list[int], int]]:
    """Sample k target positions without replacement; each example pairs the
    BOS-prefixed ids before the position with the id at the position."""
    ids = list(sample.subword_ids)
    n = len(ids)
    k = min(k_prefixes, n)
    positions = sorted(int(p) for p in rng.choice(n, size=k, replace=False))
    return [([BOS_ID] + ids[:p], ids[p]) for p in positions]


def sentiment_logits(
    m: HierModel,
    sample: EncodedSample,
    training: bool,
    rng: np.random.Generator | None = None,
) -> tuple[Tensor, BiLstmTrace]:
    H1, H1_N = _layer1(m, sample.subword_ids)
    H2, H2_N = _layer2(m, H1, training, rng)
    H_S = concat_vec([H2_N, maxpool_time(H2), avgpool_time(H2)])
    trace = BiLstmTrace(H1, H1_N, H2, H2_N, H_S)
    return affine(m.W_sentiment, m.b_sentiment, H_S), trace


def forward_sentiment(
    m: HierModel,
    sample: EncodedSample,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, BiLstmTrace]:
    """3-class distribution from concat(terminal, maxpool, avgpool) of layer 2."""
    logits, trace = sentiment_logits(m, sample, training, rng)
    return _softmax_np(logits.data), trace


# ---------------------------------------------------------------------------
# task losses
# ---------------------------------------------------------------------------

def _require_labels(task: str, batch: list[EncodedSample]) -> None:
    for s in batch:
        if task in ("lang", "pos+lang") and s.lang_labels is None:
            raise ValueError(f"task {task!r} needs language labels on every sample")
        if task in ("pos", "pos+lang") and s.pos_labels is None:
            raise ValueError(f"task {task!r} needs POS labels on every sample")
        if task == "sentiment" and s.sentiment is None:
            raise ValueError("task 'sentiment' needs a sentiment label on every sample")


def task_loss_graph(
    m: HierModel,
    task: str,
    batch: list[EncodedSample],
    training: bool = True,
    rng: np.random.Generator | None = None,
    k_prefixes: int = 4,
    lm_examples: list[list[tuple[list[int], int]]] | None = None,
) -> tuple[Tensor, int]:
    """Mean loss over every prediction in the batch, as a live graph node.

    Tagging tasks average per position (both heads for pos+lang), the LM
    averages over its sampled prefix examples, sentiment averages per sample.
    Pre-sampled `lm_examples` may be supplied to fix the LM targets.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if not batch:
        raise ValueError("empty batch")
    _require_labels(task, batch)
    losses: list[Tensor] = []
    n_preds = 0
    if task in ("lang", "pos", "pos+lang"):
        for s in batch:
            pos_logits, lang_logits, _ = tagging_logits(m, s)
            if task in ("pos", "pos+lang"):
                _, l = softmax_xent_rows(pos_logits, s.pos_labels)
                losses.append(l)
                n_preds += len(s.pos_labels)
            if task in ("lang", "pos+lang"):
                _, l = softmax_xent_rows(lang_logits, s.lang_labels)
                losses.append(l)
                n_preds += len(s.lang_labels)
    elif task == "lm":
        if lm_examples is None:
            if rng is None:
                raise ValueError("lm task needs an rng (or pre-sampled examples)")
            lm_examples = [make_lm_examples(s, k_prefixes, rng) for s in batch]
        for examples in lm_examples:
            for input_ids, target in examples:
                logits, _ = lm_logits_from_ids(m, input_ids, training, rng)
                _, l = softmax_xent(logits, target)
                losses.append(l)
                n_preds += 1
    else:
        for s in batch:
            logits, _ = sentiment_logits(m, s, training, rng)
            _, l = softmax_xent(logits, s.sentiment)
            losses.append(l)
            n_preds += 1
    return scale(addn(losses), 1.0 / n_preds), n_preds


def task_loss(
    m: HierModel,
    task: str,
    batch: list[EncodedSample],
    training: bool = True,
    rng: np.random.Generator | None = None,
    k_prefixes: int = 4,
) -> float:
    """Mean task loss; when training, backprops it into the unfrozen groups."""
    if training:
        loss, _ = task_loss_graph(m, task, batch, True, rng, k_prefixes)
        loss.backward()
        return loss.item()
    with no_grad():
        loss, _ = task_loss_graph(m, task, batch, False, rng, k_prefixes)
    return loss.item()


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

class CheckpointError(ValueError):
    """Malformed checkpoint file."""


def save_checkpoint(m: HierModel, path, metadata: dict[str, str] | None = None) -> None:
    """Magic line, `#key=value` metadata, one `name<TAB>shape<TAB>dtype` line
    per tensor, a blank line, then raw little-endian blobs in manifest order."""
    named = m.named_tensors()
    meta = dict(metadata or {})
    meta.setdefault("dropout_rate", repr(m.dropout_rate))
    with open(path, "wb") as f:
        lines = [CHECKPOINT_MAGIC]
        lines += [f"#{k}={v}" for k, v in sorted(meta.items())]
        for name, t in named:
            dims = ",".join(str(d) for d in t.shape)
            lines.append(f"{name}\t{dims}\t<f8")
        f.write(("\n".join(lines) + "\n\n").encode("utf-8"))
        for _, t in named:
            f.write(np.ascontiguousarray(t.data, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[HierModel, dict[str, str]]:
    """Rebuild the model from a checkpoint; returns (model, metadata)."""
    with open(path, "rb") as f:
        raw = f.read()
    sep = raw.find(b"\n\n")
    if sep < 0:
        raise CheckpointError(f"{path}: missing manifest terminator")
    try:
        manifest = raw[:sep].decode("utf-8").split("\n")
    except UnicodeDecodeError as e:
        raise CheckpointError(f"{path}: undecodable manifest: {e}") from None
    if manifest[0] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: bad magic {manifest[0]!r}")
    meta: dict[str, str] = {}
    tensors: dict[str, np.ndarray] = {}
    offset = sep + 2
    for line in manifest[1:]:
        if line.startswith("#"):
            k, _, v = line[1:].partition("=")
            meta[k] = v
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CheckpointError(f"{path}: malformed manifest line {line!r}")
        name, dims, dtype = parts
        if dtype not in ("<f8", "<f4"):
            raise CheckpointError(f"{path}: unsupported dtype {dtype!r}")
        shape = tuple(int(d) for d in dims.split(","))
        count = int(np.prod(shape))
        nbytes = count * np.dtype(dtype).itemsize
        blob = raw[offset : offset + nbytes]
        if len(blob) != nbytes:
            raise CheckpointError(f"{path}: truncated blob for tensor {name!r}")
        tensors[name] = np.frombuffer(blob, dtype=dtype).astype(np.float64).reshape(shape)
        offset += nbytes
    if offset != len(raw):
        raise CheckpointError(f"{path}: {len(raw) - offset} trailing bytes after blobs")

    def take(name: str) -> Tensor:
        if name not in tensors:
            raise CheckpointError(f"{path}: missing tensor {name!r}")
        return Tensor(tensors.pop(name), requires_grad=True, name=name)

    def take_lstm(label: str) -> LstmCellParams:
        try:
            return LstmCellParams(take(f"{label}.W_x"), take(f"{label}.W_h"), take(f"{label}.b"))
        except ValueError as e:
            raise CheckpointError(f"{path}: {e}") from None

    E = take("E")
    model = HierModel(
        E,
        take_lstm("lstm1_fwd"), take_lstm("lstm1_bwd"),
        take_lstm("lstm2_fwd"), take_lstm("lstm2_bwd"),
        take("W_pos"), take("b_pos"),
        take("W_lang"), take("b_lang"),
        take("W_lm"), take("b_lm"),
        take("W_sentiment"), take("b_sentiment"),
        dropout_rate=float(meta.get("dropout_rate", "0.2")),
    )
    if tensors:
        raise CheckpointError(f"{path}: unexpected tensors {sorted(tensors)}")
    two_h = 2 * model.hidden
    if model.lstm2_fwd.input_size != two_h or model.W_lm.shape != (model.vocab_size, two_h) \
            or model.W_sentiment.shape[1] != 3 * two_h:
        raise CheckpointError(f"{path}: tensor shapes are mutually inconsistent")
    return model, meta
