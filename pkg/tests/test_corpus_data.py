import numpy as np
import pytest

from cmcl.corpus import (
    EncodedSample,
    RawDocument,
    SubwordEncoder,
    TagSet,
    UNK_ID,
    URL_ID,
    USR_ID,
    Vocab,
    build_vocab,
    encode_sample,
    load_sentence_corpus,
    load_token_corpus,
    rebalance,
    save_sentence_corpus,
    save_token_corpus,
    split,
)

TRIGRAM = SubwordEncoder("trigram")


def make_vocab(tokens, min_freq=1):
    stream = [p for t in tokens for p in TRIGRAM.encode(t)]
    return build_vocab([stream], min_freq=min_freq)


def make_sentiment(n_per_class):
    samples = []
    for cls, count in enumerate(n_per_class):
        for i in range(count):
            samples.append(EncodedSample([5 + cls], [0], sentiment=cls))
    return samples


class TestVocab:
    def test_reserved_layout(self):
        v = build_vocab([["gir", "l*#"]], min_freq=1)
        assert len(v) == 7
        assert v.subword_of(0) == "<pad>" and v.subword_of(4) == "<bos>"
        assert v.id_of("gir") >= 5

    def test_counts_sum_across_streams(self):
        v = build_vocab([["gir"], ["gir", "abc"]], min_freq=1)
        assert v.freq_of(v.id_of("gir")) == 2

    def test_min_freq_filters_to_unk(self):
        v = build_vocab([["aaa", "aaa", "bbb"]], min_freq=2)
        assert "aaa" in v and "bbb" not in v
        assert v.id_of("bbb") == UNK_ID

    def test_order_freq_desc_then_lex(self):
        v = build_vocab([["bb", "bb", "aa", "aa", "cc"]], min_freq=1)
        assert [v.subword_of(i) for i in (5, 6, 7)] == ["aa", "bb", "cc"]

    def test_save_load_round_trip(self, tmp_path):
        v = make_vocab(["girl", "meri", "girl"])
        path = tmp_path / "vocab.tsv"
        v.save(path)
        w = Vocab.load(path)
        assert len(w) == len(v)
        assert w.content_hash() == v.content_hash()
        assert all(w.subword_of(i) == v.subword_of(i) for i in range(len(v)))

    def test_load_rejects_sparse_ids(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("<pad>\t0\t0\n<unk>\t2\t0\n")
        with pytest.raises(ValueError):
            Vocab.load(path)


class TestEncodeSample:
    def test_label_projection(self):
        doc = RawDocument("girl", token_labels=[("en", None)])
        v = make_vocab(["girl"])
        tags = TagSet(["en", "hi", "rest"])
        enc = encode_sample(doc, v, TRIGRAM, lang_tags=tags)
        assert len(enc.subword_ids) == 2
        assert enc.lang_labels == [0, 0]
        assert enc.token_index == [0, 0]

    def test_unknown_trigram_maps_to_unk(self):
        doc = RawDocument("zzz")
        v = make_vocab(["girl"])
        enc = encode_sample(doc, v, TRIGRAM)
        assert UNK_ID in enc.subword_ids

    def test_two_token_index(self):
        doc = RawDocument("girl meri")
        v = make_vocab(["girl", "meri"])
        enc = encode_sample(doc, v, TRIGRAM)
        assert enc.token_index == [0, 0, 1, 1]

    def test_mask_tokens_become_reserved_ids(self):
        doc = RawDocument("@bob sees http://x.co")
        v = make_vocab(["sees"])
        enc = encode_sample(doc, v, TRIGRAM)
        assert enc.subword_ids[0] == USR_ID
        assert enc.subword_ids[-1] == URL_ID

    def test_unseen_tag_named_in_error(self):
        doc = RawDocument("girl", token_labels=[("fr", None)])
        v = make_vocab(["girl"])
        with pytest.raises(KeyError, match="fr"):
            encode_sample(doc, v, TRIGRAM, lang_tags=TagSet(["en", "hi"]))

    def test_per_token_label_counts_match_subword_counts(self):
        doc = RawDocument(
            "girl meri behtareen", token_labels=[("en", "noun"), ("hi", "det"), ("hi", "adj")]
        )
        v = make_vocab(["girl", "meri", "behtareen"])
        enc = encode_sample(
            doc, v, TRIGRAM, lang_tags=TagSet(["en", "hi"]), pos_tags=TagSet(["adj", "det", "noun"])
        )
        for ti in set(enc.token_index):
            idx = [i for i, t in enumerate(enc.token_index) if t == ti]
            langs = {enc.lang_labels[i] for i in idx}
            poss = {enc.pos_labels[i] for i in idx}
            assert len(langs) == 1 and len(poss) == 1


class TestCorpusFiles:
    def test_token_corpus_round_trip(self, tmp_path):
        docs = [
            RawDocument("meri girl", token_labels=[("hi", "det"), ("en", "noun")]),
            RawDocument("chalo", token_labels=[("hi", None)]),
        ]
        path = tmp_path / "tok.tsv"
        save_token_corpus(docs, path)
        loaded = load_token_corpus(path)
        assert len(loaded) == 2
        assert loaded[0].text == "meri girl"
        assert loaded[0].token_labels == [("hi", "det"), ("en", "noun")]
        assert loaded[1].token_labels == [("hi", None)]

    def test_token_corpus_block_structure(self, tmp_path):
        path = tmp_path / "tok.tsv"
        path.write_text("a\ten\t-\nb\ten\t-\n\n")
        docs = load_token_corpus(path)
        assert len(docs) == 1 and docs[0].text == "a b"

    def test_token_corpus_malformed_line_number(self, tmp_path):
        path = tmp_path / "tok.tsv"
        path.write_text("a\ten\t-\nbroken line\n")
        with pytest.raises(ValueError, match=":2"):
            load_token_corpus(path)

    def test_sentence_corpus_round_trip(self, tmp_path):
        docs = [RawDocument("good movie", sentiment="positive")]
        path = tmp_path / "sent.tsv"
        save_sentence_corpus(docs, path)
        loaded = load_sentence_corpus(path)
        assert loaded[0].sentiment == "positive" and loaded[0].text == "good movie"

    def test_sentence_corpus_label_parse(self, tmp_path):
        path = tmp_path / "sent.tsv"
        path.write_text("positive\tgood movie\n")
        assert load_sentence_corpus(path)[0].sentiment == "positive"

    def test_sentence_corpus_missing_tab(self, tmp_path):
        path = tmp_path / "sent.tsv"
        path.write_text("positive\tfine\nnolabel here missing tab? no-tab-line\n".replace(" no-tab-line", ""))
        with pytest.raises(ValueError, match=":2"):
            load_sentence_corpus(path)

    def test_sentence_corpus_bad_label(self, tmp_path):
        path = tmp_path / "sent.tsv"
        path.write_text("meh\ttext\n")
        with pytest.raises(ValueError, match=":1"):
            load_sentence_corpus(path)


class TestRebalance:
    def test_paper_ratio_example(self):
        # 15%/50%/35% of 3879 = 582/1940/1357; mean = 1293 exactly
        samples = make_sentiment([582, 1940, 1357])
        out = rebalance(samples, seed=0)
        counts = [sum(1 for s in out if s.sentiment == c) for c in range(3)]
        assert counts == [1293, 1293, 1293]

    def test_already_balanced_unchanged(self):
        out = rebalance(make_sentiment([10, 10, 10]), seed=1)
        counts = [sum(1 for s in out if s.sentiment == c) for c in range(3)]
        assert counts == [10, 10, 10]

    def test_two_class_mean(self):
        out = rebalance(make_sentiment([2, 4]), seed=2)
        counts = [sum(1 for s in out if s.sentiment == c) for c in range(2)]
        assert counts == [3, 3]

    def test_growing_keeps_all_originals(self):
        samples = make_sentiment([2, 8])
        out = rebalance(samples, seed=3)
        small = [s for s in out if s.sentiment == 0]
        assert set(map(id, samples[:2])) <= set(map(id, small))

    def test_deterministic(self):
        samples = make_sentiment([5, 9, 4])
        a = rebalance(samples, seed=4)
        b = rebalance(samples, seed=4)
        assert [id(x) for x in a] == [id(x) for x in b]

    def test_empty_class_rejected(self):
        samples = make_sentiment([3, 3])
        samples.append(EncodedSample([5], [0], sentiment=None))
        with pytest.raises(ValueError):
            rebalance(samples, seed=0)

    def test_missing_label_rejected(self):
        with pytest.raises(ValueError):
            rebalance([EncodedSample([5], [0])], seed=0)


class TestSplit:
    def test_sizes_10(self):
        parts = split(make_sentiment([10]), (0.8, 0.1, 0.1), seed=0)
        assert [len(p) for p in parts] == [8, 1, 1]

    def test_same_seed_identical(self):
        samples = make_sentiment([7, 6, 7])
        a = split(samples, seed=5, stratified_on_sentiment=True)
        b = split(samples, seed=5, stratified_on_sentiment=True)
        assert all([id(x) for x in pa] == [id(x) for x in pb] for pa, pb in zip(a, b))

    def test_stratified_proportions(self):
        samples = make_sentiment([10, 10, 10])
        train, dev, test = split(samples, (0.8, 0.1, 0.1), seed=6, stratified_on_sentiment=True)
        for cls in range(3):
            n_train = sum(1 for s in train if s.sentiment == cls)
            assert abs(n_train - 8) <= 1

    def test_disjoint_exhaustive(self):
        samples = make_sentiment([11, 9, 13])
        parts = split(samples, seed=7, stratified_on_sentiment=True)
        ids = [id(s) for p in parts for s in p]
        assert len(ids) == len(samples)
        assert set(ids) == {id(s) for s in samples}

    def test_bad_ratios(self):
        with pytest.raises(ValueError):
            split(make_sentiment([10]), (0.5, 0.4), seed=0)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            split(make_sentiment([2]), (0.8, 0.1, 0.1), seed=0)
