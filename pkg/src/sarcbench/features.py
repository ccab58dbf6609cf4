"""Text features: word TF-IDF, character TF-IDF and five style measurements.

A fitted featurizer maps each reply to one non-negative sparse row laid out
as ``[word block | char block | style block]``.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .sparse import CsrMatrix, hstack, l2_normalize_rows, to_csr

STOP_WORDS_VERSION = "english-stop-words v1"
STYLE_FEATURES = ("char_length", "word_count_plus_one", "exclam_per_word",
                  "question_per_word", "uppercase_ratio")

_TOKEN_RE = re.compile(r"\w\w+")


class FitError(ValueError):
    pass


@lru_cache(maxsize=None)
def english_stop_words() -> frozenset[str]:
    text = resources.files("sarcbench").joinpath("data/english_stop_words.txt").read_text("utf-8")
    return frozenset(w for w in text.split("\n") if w and not w.startswith("#"))


@dataclass(frozen=True)
class FeaturizerConfig:
    max_features_word: int = 20000
    max_features_char: int = 10000
    word_ngram_range: tuple[int, int] = (1, 2)
    char_ngram_range: tuple[int, int] = (3, 5)
    lowercase: bool = True
    use_stop_words: bool = True
    sublinear_tf: bool = True

    def __post_init__(self):
        for lo, hi in (self.word_ngram_range, self.char_ngram_range):
            if not 1 <= lo <= hi:
                raise ValueError("n-gram ranges need 1 <= lo <= hi")
        if self.max_features_word < 1 or self.max_features_char < 1:
            raise ValueError("max_features must be >= 1")
        object.__setattr__(self, "word_ngram_range", tuple(self.word_ngram_range))
        object.__setattr__(self, "char_ngram_range", tuple(self.char_ngram_range))

    @property
    def stop_words(self) -> frozenset[str]:
        return english_stop_words() if self.use_stop_words else frozenset()


def tokenize_words(text: str, lowercase: bool = True, stop_words=frozenset()) -> list[str]:
    """Maximal runs of two or more word characters, minus stop words."""
    if lowercase:
        text = text.lower()
    return [t for t in _TOKEN_RE.findall(text) if t not in stop_words]


def word_ngrams(tokens: list[str], ngram_range=(1, 2)) -> list[str]:
    lo, hi = ngram_range
    if lo == hi == 1:
        return list(tokens)
    out = []
    for n in range(lo, hi + 1):
        out.extend(" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1))
    return out


def char_ngrams(text: str, ngram_range=(3, 5), lowercase: bool = True) -> list[str]:
    """Sliding character windows over the raw text, whitespace included."""
    if lowercase:
        text = text.lower()
    lo, hi = ngram_range
    out = []
    for n in range(lo, hi + 1):
        out.extend(text[i:i + n] for i in range(len(text) - n + 1))
    return out


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """Kept terms in column order with their smoothed IDF weights."""

    terms: tuple[str, ...]
    idf: np.ndarray
    n_docs: int
    term_to_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "idf", np.asarray(self.idf, dtype=np.float64))
        if len(self.idf) != len(self.terms):
            raise ValueError("idf and terms differ in length")
        object.__setattr__(self, "term_to_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (isinstance(other, Vocabulary) and self.terms == other.terms
                and self.n_docs == other.n_docs and np.array_equal(self.idf, other.idf))


def smoothed_idf(df, n_docs: int) -> np.ndarray:
    return np.log((1.0 + n_docs) / (1.0 + np.asarray(df, dtype=np.float64))) + 1.0


def fit_vocabulary(docs: list[list[str]], max_features: int) -> Vocabulary:
    """Keep the ``max_features`` most frequent terms and compute their IDF.

    Frequency is total occurrences over the corpus; ties go to the
    lexicographically smaller term.  Kept terms are indexed in sorted order.
    """
    if not docs:
        raise FitError("cannot fit a vocabulary on zero documents")
    totals: Counter = Counter()
    df: Counter = Counter()
    for doc in docs:
        c = Counter(doc)
        totals.update(c)
        df.update(c.keys())
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    terms = sorted(t for t, _ in ranked)
    return Vocabulary(terms, smoothed_idf([df[t] for t in terms], len(docs)), len(docs))


def transform_tfidf(vocab: Vocabulary, docs: list[list[str]], sublinear: bool = True) -> CsrMatrix:
    """TF-IDF rows, L2-normalized; out-of-vocabulary terms are ignored."""
    index = vocab.term_to_index
    offsets = [0]
    cols_parts = []
    tf_parts = []
    for doc in docs:
        counts = Counter(index[t] for t in doc if t in index)
        cols = np.fromiter(sorted(counts), dtype=np.int64, count=len(counts))
        cols_parts.append(cols)
        tf_parts.append(np.array([counts[c] for c in cols], dtype=np.float64))
        offsets.append(offsets[-1] + len(cols))
    cols = np.concatenate(cols_parts) if cols_parts else np.zeros(0, dtype=np.int64)
    tf = np.concatenate(tf_parts) if tf_parts else np.zeros(0)
    if sublinear:
        tf = 1.0 + np.log(tf)
    m = CsrMatrix(len(docs), len(vocab), offsets, cols, tf * vocab.idf[cols])
    return l2_normalize_rows(m)


def stylometrics(texts) -> np.ndarray:
    """Five raw style measurements per text, in ``STYLE_FEATURES`` order.

    The word count carries a +1 offset and the punctuation rates are divided
    by that offset count.  Values are not rescaled.
    """
    out = np.zeros((len(texts), len(STYLE_FEATURES)))
    for i, t in enumerate(texts):
        length = float(len(t))
        words = len(t.split()) + 1.0
        upper = sum(1 for ch in t if ch.isupper())
        out[i] = (length, words, t.count("!") / words, t.count("?") / words,
                  upper / max(length, 1.0))
    return out


def _as_texts(texts) -> list[str]:
    if isinstance(texts, str):
        raise TypeError("expected a sequence of texts, got a single string")
    return [str(t) for t in texts]


@dataclass(frozen=True, eq=False)
class FittedFeaturizer:
    config: FeaturizerConfig
    word_vocab: Vocabulary
    char_vocab: Vocabulary

    @property
    def total_width(self) -> int:
        return len(self.word_vocab) + len(self.char_vocab) + len(STYLE_FEATURES)

    @property
    def block_widths(self) -> tuple[int, int, int]:
        return len(self.word_vocab), len(self.char_vocab), len(STYLE_FEATURES)

    def word_docs(self, texts):
        cfg = self.config
        return [word_ngrams(tokenize_words(t, cfg.lowercase, cfg.stop_words), cfg.word_ngram_range)
                for t in texts]

    def char_docs(self, texts):
        cfg = self.config
        return [char_ngrams(t, cfg.char_ngram_range, cfg.lowercase) for t in texts]

    def transform(self, texts) -> CsrMatrix:
        texts = _as_texts(texts)
        sub = self.config.sublinear_tf
        X = hstack([
            transform_tfidf(self.word_vocab, self.word_docs(texts), sub),
            transform_tfidf(self.char_vocab, self.char_docs(texts), sub),
            to_csr(stylometrics(texts)),
        ])
        if X.nnz and X.values.min() < 0:
            raise ValueError("feature matrix has negative entries")
        return X

    def __eq__(self, other):
        return (isinstance(other, FittedFeaturizer) and self.config == other.config
                and self.word_vocab == other.word_vocab and self.char_vocab == other.char_vocab)


def fit(config: FeaturizerConfig, train_texts) -> FittedFeaturizer:
    """Fit both vocabularies on the training texts."""
    texts = _as_texts(train_texts)
    if not texts:
        raise FitError("cannot fit features on zero texts")
    shell = FittedFeaturizer(config, Vocabulary((), [], 0), Vocabulary((), [], 0))
    return FittedFeaturizer(
        config,
        fit_vocabulary(shell.word_docs(texts), config.max_features_word),
        fit_vocabulary(shell.char_docs(texts), config.max_features_char),
    )


def fit_transform(config: FeaturizerConfig, train_texts) -> tuple[FittedFeaturizer, CsrMatrix]:
    f = fit(config, train_texts)
    return f, f.transform(train_texts)

