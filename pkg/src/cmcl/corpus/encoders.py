"""Subword codecs: character trigrams, character unigrams, and BPE.

Each token is end-marked with `*` before chunking; trigram chunks are padded
to width 3 with `#`. The two marker characters are reserved, which is why
normalization deletes them from input text. A token therefore always round
trips: concatenate the pieces, drop `#`s, drop the single trailing `*`.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Iterable

TERMINAL = "*"
PAD_CHAR = "#"

ENCODER_NAMES = ("unigram", "trigram", "bpe")


def _check_token(token: str) -> None:
    if not token:
        raise ValueError("cannot encode an empty token")
    if TERMINAL in token or PAD_CHAR in token:
        raise ValueError(f"token {token!r} contains a reserved character (* or #)")


def trigram_encode(token: str) -> list[str]:
    """Non-overlapping 3-char chunks of token + `*`, last chunk padded with `#`."""
    _check_token(token)
    marked = token + TERMINAL
    out = [marked[i : i + 3] for i in range(0, len(marked), 3)]
    out[-1] = out[-1].ljust(3, PAD_CHAR)
    return out


def unigram_encode(token: str) -> list[str]:
    """Characters of the token followed by the terminal marker."""
    _check_token(token)
    return list(token) + [TERMINAL]


# ---------------------------------------------------------------------------
# BPE
# ---------------------------------------------------------------------------

Merge = tuple[str, str]


def _pair_counts(seqs: dict[tuple[str, ...], int]) -> Counter:
    counts: Counter = Counter()
    for seq, freq in seqs.items():
        for a, b in zip(seq, seq[1:]):
            counts[(a, b)] += freq
    return counts


def _apply_merge(seq: tuple[str, ...], pair: Merge) -> tuple[str, ...]:
    out: list[str] = []
    i = 0
    joined = pair[0] + pair[1]
    while i < len(seq):
        if i + 1 < len(seq) and seq[i] == pair[0] and seq[i + 1] == pair[1]:
            out.append(joined)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return tuple(out)


def bpe_learn(tokens_with_counts: dict[str, int], n_merges: int) -> list[Merge]:
    """Greedy most-frequent-pair merging over end-marked tokens.

    Ties break toward the lexicographically smallest (left, right) pair so the
    merge list is deterministic. Stops early when no adjacent pair remains.
    """
    if n_merges < 0:
        raise ValueError("n_merges must be >= 0")
    seqs: dict[tuple[str, ...], int] = {}
    for token, count in tokens_with_counts.items():
        seqs[tuple(token)] = seqs.get(tuple(token), 0) + count
    merges: list[Merge] = []
    for _ in range(n_merges):
        counts = _pair_counts(seqs)
        if not counts:
            break
        best = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        merges.append(best)
        seqs = {_apply_merge(seq, best): freq for seq, freq in seqs.items()}
    return merges


def bpe_encode(token: str, merges: list[Merge]) -> list[str]:
    """Apply learned merges, in order, to the token's character sequence + `*`."""
    _check_token(token)
    seq: tuple[str, ...] = tuple(token) + (TERMINAL,)
    for pair in merges:
        if len(seq) == 1:
            break
        seq = _apply_merge(seq, pair)
    return list(seq)


def save_merges(merges: list[Merge], path) -> None:
    """One merge per line, `left<SPACE>right`, in application order."""
    with open(path, "w", encoding="utf-8") as f:
        for left, right in merges:
            f.write(f"{left} {right}\n")


def load_merges(path) -> list[Merge]:
    merges: list[Merge] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: malformed merge line {line!r}")
            merges.append((parts[0], parts[1]))
    return merges


class SubwordEncoder:
    """A named token→pieces function; `bpe` carries its learned merge list."""

    def __init__(self, name: str, merges: list[Merge] | None = None):
        if name not in ENCODER_NAMES:
            raise ValueError(f"unknown encoder {name!r}; expected one of {ENCODER_NAMES}")
        if name == "bpe" and merges is None:
            raise ValueError("bpe encoder needs a merge list")
        self.name = name
        self.merges = merges

    def encode(self, token: str) -> list[str]:
        if self.name == "trigram":
            return trigram_encode(token)
        if self.name == "unigram":
            return unigram_encode(token)
        return bpe_encode(token, self.merges)
