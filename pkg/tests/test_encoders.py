import string
from collections import Counter

import pytest

from cmcl.corpus import (
    SubwordEncoder,
    bpe_encode,
    bpe_learn,
    load_merges,
    save_merges,
    trigram_encode,
    unigram_encode,
)
from cmcl.nn import RngState


def brute_pair_counts(tokens_with_counts):
    """Independent oracle: count every adjacent symbol pair by hand."""
    counts = Counter()
    for token, freq in tokens_with_counts.items():
        chars = list(token)
        for a, b in zip(chars, chars[1:]):
            counts[(a, b)] += freq
    return counts


def test_trigram_worked_example():
    assert trigram_encode("girl") == ["gir", "l*#"]


def test_trigram_short_and_exact_fits():
    assert trigram_encode("a") == ["a*#"]
    assert trigram_encode("hello") == ["hel", "lo*"]


def test_trigram_rejects_reserved():
    with pytest.raises(ValueError):
        trigram_encode("a*b")
    with pytest.raises(ValueError):
        trigram_encode("a#b")
    with pytest.raises(ValueError):
        trigram_encode("")


def test_trigram_round_trip_and_shape_property():
    gen = RngState(5).generator()
    alphabet = string.ascii_lowercase + "0123456789<>@._-"
    for _ in range(2000):
        n = int(gen.integers(1, 12))
        token = "".join(alphabet[int(gen.integers(0, len(alphabet)))] for _ in range(n))
        pieces = trigram_encode(token)
        assert all(len(p) == 3 for p in pieces)
        joined = "".join(pieces)
        assert joined.count("*") == 1
        assert joined.replace("#", "").rstrip("*") == token
        assert joined.replace("#", "")[:-1] == token


def test_unigram_examples():
    assert unigram_encode("ab") == ["a", "b", "*"]
    assert unigram_encode("x") == ["x", "*"]
    assert unigram_encode("gir") == ["g", "i", "r", "*"]


def test_bpe_learn_single_token_lexicographic_tie():
    # all pairs in "l o w *" have count 5; the tie breaks to ("l", "o")
    oracle = brute_pair_counts({"low*": 5})
    assert set(oracle.values()) == {5}
    assert bpe_learn({"low*": 5}, 1) == [("l", "o")]


def test_bpe_learn_zero_merges():
    assert bpe_learn({"ab*": 3}, 0) == []


def test_bpe_learn_repeated_chars():
    oracle = brute_pair_counts({"aaaa*": 1})
    assert oracle[("a", "a")] == 3
    assert bpe_learn({"aaaa*": 1}, 1) == [("a", "a")]


def test_bpe_learn_against_pair_count_oracle():
    gen = RngState(6).generator()
    for _ in range(20):
        tokens = {}
        for _ in range(8):
            n = int(gen.integers(1, 6))
            tok = "".join("abcd"[int(gen.integers(0, 4))] for _ in range(n)) + "*"
            tokens[tok] = tokens.get(tok, 0) + int(gen.integers(1, 9))
        got = bpe_learn(tokens, 1)
        counts = brute_pair_counts(tokens)
        assert got == [min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]]


def test_bpe_learn_exhausts_available_merges():
    merges = bpe_learn({"ab*": 1}, 100)
    # "a b *" can merge at most twice before collapsing to one symbol
    assert len(merges) == 2


def test_bpe_encode_examples():
    assert bpe_encode("ab", []) == ["a", "b", "*"]
    assert bpe_encode("ab", [("a", "b")]) == ["ab", "*"]


def test_bpe_encode_never_longer_than_unigram():
    gen = RngState(7).generator()
    corpus = {}
    for _ in range(50):
        n = int(gen.integers(1, 8))
        tok = "".join("abcde"[int(gen.integers(0, 5))] for _ in range(n))
        corpus[tok + "*"] = corpus.get(tok + "*", 0) + 1
    merges = bpe_learn(corpus, 30)
    for tok_marked in corpus:
        tok = tok_marked[:-1]
        assert len(bpe_encode(tok, merges)) <= len(unigram_encode(tok))


def test_bpe_piece_count_monotone_in_n_merges():
    gen = RngState(8).generator()
    corpus = {}
    for _ in range(40):
        n = int(gen.integers(2, 7))
        tok = "".join("xyzw"[int(gen.integers(0, 4))] for _ in range(n))
        corpus[tok + "*"] = corpus.get(tok + "*", 0) + int(gen.integers(1, 5))
    prev = None
    for k in range(0, 25, 4):
        merges = bpe_learn(corpus, k)
        total = sum(
            len(bpe_encode(tok[:-1], merges)) * freq for tok, freq in corpus.items()
        )
        if prev is not None:
            assert total <= prev
        prev = total


def test_merge_file_round_trip(tmp_path):
    merges = [("l", "o"), ("lo", "w*")]
    path = tmp_path / "merges.txt"
    save_merges(merges, path)
    assert load_merges(path) == merges
    assert path.read_text() == "l o\nlo w*\n"


def test_encoder_factory():
    assert SubwordEncoder("trigram").encode("girl") == ["gir", "l*#"]
    assert SubwordEncoder("unigram").encode("ab") == ["a", "b", "*"]
    assert SubwordEncoder("bpe", merges=[("a", "b")]).encode("ab") == ["ab", "*"]
    with pytest.raises(ValueError):
        SubwordEncoder("bpe")
    with pytest.raises(ValueError):
        SubwordEncoder("wordpiece")
