"""Documents, encoded samples, corpus file formats, rebalancing and splits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn.rng import RngState
from .encoders import SubwordEncoder
from .text import MASK_TOKENS, URL_TOKEN, USR_TOKEN, normalize, tokenize
from .vocab import URL_ID, USR_ID, Vocab

SENTIMENT_CLASSES = ("negative", "neutral", "positive")


@dataclass
class RawDocument:
    """One text with optional per-token (language, pos) labels and sentiment.

    `token_labels`, when present, aligns with the whitespace tokens of the
    normalized text; `sentiment` is one of negative/neutral/positive.
    """

    text: str
    token_labels: list[tuple[str, str | None]] | None = None
    sentiment: str | None = None

    def __post_init__(self) -> None:
        if self.sentiment is not None and self.sentiment not in SENTIMENT_CLASSES:
            raise ValueError(f"unknown sentiment label {self.sentiment!r}")
        if self.token_labels is not None:
            n_tokens = len(tokenize(normalize(self.text)))
            if len(self.token_labels) != n_tokens:
                raise ValueError(
                    f"{len(self.token_labels)} token labels for {n_tokens} "
                    f"normalized tokens in {self.text!r}"
                )


class TagSet:
    """Ordered inventory of tag strings with name → index lookup."""

    def __init__(self, names):
        self.names = tuple(names)
        if not self.names:
            raise ValueError("empty tagset")
        self._index = {n: i for i, n in enumerate(self.names)}
        if len(self._index) != len(self.names):
            raise ValueError("duplicate tag name")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown tag {name!r} (tagset: {', '.join(self.names)})") from None

    @classmethod
    def from_documents(cls, docs, which: int) -> "TagSet":
        """Collect the sorted unique tags at tuple position `which` (0=lang, 1=pos)."""
        seen = {
            labels[which]
            for doc in docs
            if doc.token_labels
            for labels in doc.token_labels
            if labels[which] is not None
        }
        return cls(sorted(seen))


@dataclass
class EncodedSample:
    """Subword-id view of a document, with labels projected onto subwords."""

    subword_ids: list[int]
    token_index: list[int]
    lang_labels: list[int] | None = None
    pos_labels: list[int] | None = None
    sentiment: int | None = None

    def __post_init__(self) -> None:
        if not self.subword_ids:
            raise ValueError("empty sample")
        for labels in (self.lang_labels, self.pos_labels):
            if labels is not None and len(labels) != len(self.subword_ids):
                raise ValueError("per-subword labels must align with subword_ids")


def encode_sample(
    doc: RawDocument,
    vocab: Vocab,
    encoder: SubwordEncoder,
    lang_tags: TagSet | None = None,
    pos_tags: TagSet | None = None,
) -> EncodedSample:
    """Encode a document: subwords per token, token labels copied to each of
    its subwords, unknown subwords mapped to UNK. Mask tokens (`<usr>`,
    `<url>`) become single reserved ids rather than being decomposed."""
    tokens = tokenize(normalize(doc.text))
    if not tokens:
        raise ValueError(f"document normalizes to empty text: {doc.text!r}")
    ids: list[int] = []
    token_index: list[int] = []
    lang_ids: list[int] | None = [] if (doc.token_labels and lang_tags) else None
    pos_ids: list[int] | None = None
    if doc.token_labels and pos_tags and any(p is not None for _, p in doc.token_labels):
        pos_ids = []
    for ti, token in enumerate(tokens):
        if token == USR_TOKEN:
            piece_ids = [USR_ID]
        elif token == URL_TOKEN:
            piece_ids = [URL_ID]
        else:
            piece_ids = [vocab.id_of(p) for p in encoder.encode(token)]
        ids.extend(piece_ids)
        token_index.extend([ti] * len(piece_ids))
        if doc.token_labels:
            lang, pos = doc.token_labels[ti]
            if lang_ids is not None:
                lang_ids.extend([lang_tags.index(lang)] * len(piece_ids))
            if pos_ids is not None:
                if pos is None:
                    raise ValueError(f"token {token!r} is missing a POS tag")
                pos_ids.extend([pos_tags.index(pos)] * len(piece_ids))
    sentiment = SENTIMENT_CLASSES.index(doc.sentiment) if doc.sentiment is not None else None
    return EncodedSample(ids, token_index, lang_ids, pos_ids, sentiment)


# ---------------------------------------------------------------------------
# corpus files
# ---------------------------------------------------------------------------

def load_token_corpus(path) -> list[RawDocument]:
    """`token<TAB>lang<TAB>pos` lines (pos `-` when absent); blank line ends a
    sentence. Raises with the offending line number on malformed input."""
    docs: list[RawDocument] = []
    tokens: list[str] = []
    labels: list[tuple[str, str | None]] = []

    def flush(lineno: int) -> None:
        if not tokens:
            return
        try:
            docs.append(RawDocument(" ".join(tokens), token_labels=list(labels)))
        except ValueError as e:
            raise ValueError(f"{path}: sentence ending at line {lineno}: {e}") from None
        tokens.clear()
        labels.clear()

    with open(path, encoding="utf-8") as f:
        lineno = 0
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not parts[0]:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>lang<TAB>pos")
            token, lang, pos = parts
            tokens.append(token)
            labels.append((lang, None if pos == "-" else pos))
        flush(lineno + 1)
    return docs


def save_token_corpus(docs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            for token, (lang, pos) in zip(tokenize(doc.text), doc.token_labels):
                f.write(f"{token}\t{lang}\t{pos if pos is not None else '-'}\n")
            f.write("\n")


def load_sentence_corpus(path) -> list[RawDocument]:
    """One `label<TAB>text` sample per line, label in negative/neutral/positive."""
    docs: list[RawDocument] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected label<TAB>text")
            label, text = line.split("\t", 1)
            if label not in SENTIMENT_CLASSES:
                raise ValueError(f"{path}:{lineno}: unknown sentiment label {label!r}")
            docs.append(RawDocument(text, sentiment=label))
    return docs


def save_sentence_corpus(docs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            f.write(f"{doc.sentiment}\t{doc.text}\n")


# ---------------------------------------------------------------------------
# class rebalancing and splits
# ---------------------------------------------------------------------------

def rebalance(samples: list, seed: int | RngState) -> list:
    """Resample every sentiment class to floor(mean class count).

    Shrinking classes are subsampled uniformly without replacement; growing
    classes keep all originals and draw the remainder with replacement.
    Deterministic given the seed; sample order is by class, then draw order.
    """
    state = seed if isinstance(seed, RngState) else RngState(seed)
    by_class: dict[int, list] = {}
    for s in samples:
        if s.sentiment is None:
            raise ValueError("rebalance needs a sentiment label on every sample")
        by_class.setdefault(s.sentiment, []).append(s)
    for cls, members in sorted(by_class.items()):
        if not members:
            raise ValueError(f"class {cls} is empty")
    target = int(np.floor(np.mean([len(m) for m in by_class.values()])))
    gen = state.generator()
    out: list = []
    for cls in sorted(by_class):
        members = by_class[cls]
        if len(members) > target:
            keep = gen.choice(len(members), size=target, replace=False)
            out.extend(members[i] for i in sorted(keep))
        elif len(members) < target:
            extra = gen.choice(len(members), size=target - len(members), replace=True)
            out.extend(members)
            out.extend(members[i] for i in extra)
        else:
            out.extend(members)
    return out


def split(
    samples: list,
    ratios: tuple[float, ...] = (0.8, 0.1, 0.1),
    seed: int | RngState = 0,
    stratified_on_sentiment: bool = False,
) -> tuple[list, ...]:
    """Disjoint, exhaustive partition with the given ratios.

    Stratification preserves per-class proportions within ±1 sample. The
    partition is a pure function of (samples, ratios, seed).
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    if len(samples) < len(ratios):
        raise ValueError(f"cannot split {len(samples)} samples into {len(ratios)} parts")
    state = seed if isinstance(seed, RngState) else RngState(seed)
    gen = state.generator()

    def cut(items: list, perm: np.ndarray) -> list[list]:
        n = len(items)
        bounds = [int(round(sum(ratios[: k + 1]) * n)) for k in range(len(ratios))]
        bounds[-1] = n
        parts: list[list] = []
        lo = 0
        for hi in bounds:
            parts.append([items[i] for i in perm[lo:hi]])
            lo = hi
        return parts

    if not stratified_on_sentiment:
        parts = cut(samples, gen.permutation(len(samples)))
    else:
        by_class: dict[int, list] = {}
        for s in samples:
            if s.sentiment is None:
                raise ValueError("stratified split needs sentiment labels")
            by_class.setdefault(s.sentiment, []).append(s)
        parts = [[] for _ in ratios]
        for cls in sorted(by_class):
            members = by_class[cls]
            for part, cls_part in zip(parts, cut(members, gen.permutation(len(members)))):
                part.extend(cls_part)
    return tuple(parts)
