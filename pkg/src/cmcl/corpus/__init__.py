"""Corpus ingestion, normalization, subword encoding, rebalancing, splits."""

from .data import (
    SENTIMENT_CLASSES,
    EncodedSample,
    RawDocument,
    TagSet,
    encode_sample,
    load_sentence_corpus,
    load_token_corpus,
    rebalance,
    save_sentence_corpus,
    save_token_corpus,
    split,
)
from .encoders import (
    ENCODER_NAMES,
    SubwordEncoder,
    bpe_encode,
    bpe_learn,
    load_merges,
    save_merges,
    trigram_encode,
    unigram_encode,
)
from .synth import LANG_TAGS, POS_TAGS, SynthProfile, synth_corpus
from .text import normalize, tokenize
from .vocab import BOS_ID, PAD_ID, RESERVED, UNK_ID, URL_ID, USR_ID, Vocab, build_vocab

__all__ = [
    "BOS_ID",
    "ENCODER_NAMES",
    "EncodedSample",
    "LANG_TAGS",
    "PAD_ID",
    "POS_TAGS",
    "RESERVED",
    "RawDocument",
    "SENTIMENT_CLASSES",
    "SubwordEncoder",
    "SynthProfile",
    "TagSet",
    "UNK_ID",
    "URL_ID",
    "USR_ID",
    "Vocab",
    "bpe_encode",
    "bpe_learn",
    "build_vocab",
    "encode_sample",
    "load_merges",
    "load_sentence_corpus",
    "load_token_corpus",
    "normalize",
    "rebalance",
    "save_merges",
    "save_sentence_corpus",
    "save_token_corpus",
    "split",
    "synth_corpus",
    "tokenize",
    "trigram_encode",
    "unigram_encode",
]
