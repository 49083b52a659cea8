"""Seeded synthetic code-mixed corpora for data-free training and testing.

The generator builds pseudo-code-mixed sentences from two disjoint synthetic
lexicons plus a small "rest" inventory of digit interjections:

  * language "en" words use only the letters  b c d f g l m n p r s t a e i
  * language "hi" words use only the letters  h j k q v w y z o u
  * "rest" tokens are digit strings

so language identification is learnable from subwords alone. Sentences come
from a handful of part-of-speech templates (det/noun/verb/adj slots), which
gives the next-subword LM task real structure to model. Sentiment is decided
by polarity adjectives, flipped when a negator word directly precedes them,
which makes the sentiment task depend on token combinations rather than bag
membership. Every token carries its source-lexicon language tag and its slot
POS tag; a task profile chooses which annotations survive into the corpus.

All draws flow from one RngState, so a (seed, n, profile) triple maps to a
byte-identical corpus on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..nn.rng import RngState
from .data import SENTIMENT_CLASSES, RawDocument

_EN_CONS = "bcdfglmnprst"
_EN_VOW = "aei"
_HI_CONS = "hjkqvwyz"
_HI_VOW = "ou"

POS_TAGS = ("det", "noun", "verb", "adj", "neg", "intj")
LANG_TAGS = ("en", "hi", "rest")

_TEMPLATES = (
    ("det", "noun", "verb"),
    ("det", "adj", "noun", "verb"),
    ("det", "noun", "verb", "adj"),
    ("noun", "verb", "adj"),
    ("intj", "det", "noun", "verb"),
    ("noun", "verb", "det", "noun"),
)
_ADJ_TEMPLATES = tuple(t for t in _TEMPLATES if "adj" in t)


def _make_words(gen, cons: str, vow: str, count: int, taken: set[str]) -> list[str]:
    words: list[str] = []
    while len(words) < count:
        length = int(gen.integers(4, 7))
        chars = []
        for i in range(length):
            pool = cons if i % 2 == 0 else vow
            chars.append(pool[int(gen.integers(0, len(pool)))])
        w = "".join(chars)
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def _build_lexicons() -> dict:
    # Lexicons are part of the task definition, not of any one corpus, so they
    # come from a fixed internal seed: corpora with different user seeds share
    # one vocabulary.
    gen = RngState(0xC0DE).generator()
    taken: set[str] = set()
    lex: dict = {}
    for lang, cons, vow in (("en", _EN_CONS, _EN_VOW), ("hi", _HI_CONS, _HI_VOW)):
        lex[lang] = {
            "det": _make_words(gen, cons, vow, 2, taken),
            "noun": _make_words(gen, cons, vow, 14, taken),
            "verb": _make_words(gen, cons, vow, 10, taken),
            "adj_pos": _make_words(gen, cons, vow, 4, taken),
            "adj_neg": _make_words(gen, cons, vow, 4, taken),
            "adj_neu": _make_words(gen, cons, vow, 4, taken),
            "neg": _make_words(gen, cons, vow, 2, taken),
        }
    lex["rest"] = [str(100 + 7 * k) for k in range(6)]
    return lex


_LEXICONS = _build_lexicons()


@dataclass(frozen=True)
class SynthProfile:
    """What to annotate and how to shape the generated distribution."""

    kind: str  # one of: langid, pos, lm, sentiment
    class_ratios: tuple[float, float, float] = (0.15, 0.50, 0.35)
    mix_rate: float = 0.3
    negation_rate: float = 0.3

    def __post_init__(self) -> None:
        if self.kind not in ("langid", "pos", "lm", "sentiment"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if abs(sum(self.class_ratios) - 1.0) > 1e-9:
            raise ValueError("class ratios must sum to 1")


def _pick(gen, items):
    return items[int(gen.integers(0, len(items)))]


def _sentence(gen, profile: SynthProfile):
    """One sentence: (tokens, lang tags, pos tags, sentiment class name)."""
    r = gen.random()
    target = 0 if r < profile.class_ratios[0] else (1 if r < sum(profile.class_ratios[:2]) else 2)
    label = SENTIMENT_CLASSES[target]
    template = _pick(gen, _ADJ_TEMPLATES if label != "neutral" else _TEMPLATES)
    negated = gen.random() < profile.negation_rate if label != "neutral" else (
        "adj" in template and gen.random() < profile.negation_rate * 0.5
    )
    matrix = _pick(gen, ("en", "hi"))

    tokens: list[str] = []
    langs: list[str] = []
    poss: list[str] = []
    for slot in template:
        if slot == "intj":
            tokens.append(_pick(gen, _LEXICONS["rest"]))
            langs.append("rest")
            poss.append("intj")
            continue
        lang = matrix if gen.random() >= profile.mix_rate else ("hi" if matrix == "en" else "en")
        if slot == "adj":
            if label == "neutral":
                bucket = "adj_neu"
            elif (label == "positive") != negated:
                bucket = "adj_pos"
            else:
                bucket = "adj_neg"
            if negated:
                neg_lang = matrix if gen.random() >= profile.mix_rate else (
                    "hi" if matrix == "en" else "en"
                )
                tokens.append(_pick(gen, _LEXICONS[neg_lang]["neg"]))
                langs.append(neg_lang)
                poss.append("neg")
            tokens.append(_pick(gen, _LEXICONS[lang][bucket]))
        else:
            tokens.append(_pick(gen, _LEXICONS[lang][slot]))
        langs.append(lang)
        poss.append(slot)
    return tokens, langs, poss, label


def synth_corpus(seed: int | RngState, n_sentences: int, profile: SynthProfile) -> list[RawDocument]:
    """Generate `n_sentences` documents annotated according to the profile."""
    if n_sentences < 1:
        raise ValueError("n_sentences must be >= 1")
    state = seed if isinstance(seed, RngState) else RngState(seed)
    gen = state.generator()
    docs: list[RawDocument] = []
    for _ in range(n_sentences):
        tokens, langs, poss, label = _sentence(gen, profile)
        text = " ".join(tokens)
        if profile.kind == "langid":
            docs.append(RawDocument(text, token_labels=[(l, None) for l in langs]))
        elif profile.kind == "pos":
            docs.append(RawDocument(text, token_labels=list(zip(langs, poss))))
        elif profile.kind == "lm":
            docs.append(RawDocument(text))
        else:
            docs.append(RawDocument(text, sentiment=label))
    return docs
