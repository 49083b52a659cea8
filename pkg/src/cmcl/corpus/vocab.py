"""Subword vocabulary with reserved specials and a stable on-disk format."""
from __future__ import annotations

import hashlib
from collections import Counter
from collections.abc import Iterable

RESERVED = ("<pad>", "<unk>", "<usr>", "<url>", "<bos>")
PAD_ID, UNK_ID, USR_ID, URL_ID, BOS_ID = range(5)


class Vocab:
    """Dense bidirectional subword ↔ id mapping; ids 0..4 are reserved."""

    def __init__(self, entries: list[tuple[str, int]]):
        """`entries` lists (subword, freq) for ids 5.. in final order."""
        self._subwords = list(RESERVED) + [s for s, _ in entries]
        self._freqs = [0] * len(RESERVED) + [f for _, f in entries]
        self._index = {s: i for i, s in enumerate(self._subwords)}
        if len(self._index) != len(self._subwords):
            raise ValueError("duplicate subword in vocabulary")

    def __len__(self) -> int:
        return len(self._subwords)

    def __contains__(self, subword: str) -> bool:
        return subword in self._index

    def id_of(self, subword: str) -> int:
        """Id of the subword, or UNK_ID when out of vocabulary."""
        return self._index.get(subword, UNK_ID)

    def subword_of(self, idx: int) -> str:
        return self._subwords[idx]

    def freq_of(self, idx: int) -> int:
        return self._freqs[idx]

    def save(self, path) -> None:
        """One `subword<TAB>id<TAB>freq` line per entry, reserved first."""
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for i, (s, freq) in enumerate(zip(self._subwords, self._freqs)):
                f.write(f"{s}\t{i}\t{freq}\n")

    @classmethod
    def load(cls, path) -> "Vocab":
        subwords: list[str] = []
        freqs: list[int] = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected subword<TAB>id<TAB>freq")
                subword, idx, freq = parts
                if int(idx) != len(subwords):
                    raise ValueError(f"{path}:{lineno}: ids must be dense and in order")
                subwords.append(subword)
                freqs.append(int(freq))
        if subwords[: len(RESERVED)] != list(RESERVED):
            raise ValueError(f"{path}: reserved entries missing or reordered")
        return cls(list(zip(subwords[len(RESERVED) :], freqs[len(RESERVED) :])))

    def content_hash(self) -> str:
        """Stable hash of the full mapping, used for checkpoint compatibility."""
        h = hashlib.sha256()
        for s, freq in zip(self._subwords, self._freqs):
            h.update(f"{s}\t{freq}\n".encode("utf-8"))
        return h.hexdigest()


def build_vocab(streams: Iterable[Iterable[str]], min_freq: int = 2) -> Vocab:
    """Union subword counts over streams; entries below min_freq fall to UNK.

    Order is frequency-descending, then lexicographic, so builds are
    deterministic. Reserved strings appearing in a stream are dropped (they
    already hold fixed ids).
    """
    counts: Counter = Counter()
    n_streams = 0
    for stream in streams:
        n_streams += 1
        counts.update(stream)
    if n_streams == 0:
        raise ValueError("need at least one stream")
    for special in RESERVED:
        counts.pop(special, None)
    kept = [(s, f) for s, f in counts.items() if f >= min_freq]
    kept.sort(key=lambda kv: (-kv[1], kv[0]))
    return Vocab(kept)
