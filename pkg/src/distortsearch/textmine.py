"""Token normalization, n-grams, and TF-IDF feature matrices.

The normalization pipeline is fixed: lowercase, split on runs of
non-alphanumeric characters, drop stop words, then Porter-stem each token.
Feature weights are raw term frequency times ln(N/df) with no smoothing.
"""
from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._porter import stem

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stop-word list, one lowercase word per line; '#' comments skipped."""
    words: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def normalize_tokens(
    text: str,
    stopwords: frozenset[str] | set[str] = frozenset(),
    use_stemmer: bool = True,
) -> list[str]:
    """Lowercase, tokenize, drop stop words, and stem.

    Stop words are matched before stemming, so the list should hold surface
    forms. Order of surviving tokens is preserved.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    kept = [t for t in tokens if t not in stopwords]
    if use_stemmer:
        kept = [stem(t) for t in kept]
    return kept


def ngrams(tokens: Sequence[str], n: int) -> list[str]:
    """Contiguous ``n``-token windows joined by single spaces."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def all_grams(tokens: Sequence[str], ngram_max: int) -> list[str]:
    """Every 1..ngram_max gram of ``tokens``, shortest first."""
    out: list[str] = []
    for n in range(1, ngram_max + 1):
        out.extend(ngrams(tokens, n))
    return out


def build_vocabulary(
    token_lists: Iterable[Sequence[str]], ngram_max: int = 1
) -> list[str]:
    """Sorted union of all 1..ngram_max grams across the documents."""
    vocab: set[str] = set()
    for tokens in token_lists:
        vocab.update(all_grams(tokens, ngram_max))
    return sorted(vocab)


def build_matrix(
    token_lists: Sequence[Sequence[str]],
    ngram_max: int = 1,
    vocabulary: Sequence[str] | None = None,
) -> tuple[np.ndarray, list[str]]:
    """TF-IDF matrix over normalized token lists.

    Weight of gram ``g`` in document ``d`` is ``tf(g, d) * ln(N / df(g))``
    where tf is the raw occurrence count, N the number of documents, and df
    the number of documents containing the gram at least once. A gram
    appearing in every document therefore weighs zero. Grams outside a
    caller-supplied ``vocabulary`` are ignored.
    """
    if ngram_max < 1:
        raise ValueError("ngram_max must be >= 1")
    n_docs = len(token_lists)
    if n_docs == 0:
        raise ValueError("need at least one document")
    doc_grams = [all_grams(tokens, ngram_max) for tokens in token_lists]
    if vocabulary is None:
        vocab = sorted({g for grams in doc_grams for g in grams})
    else:
        vocab = list(vocabulary)
    index = {g: i for i, g in enumerate(vocab)}

    tf = np.zeros((n_docs, len(vocab)), dtype=np.float64)
    for row, grams in enumerate(doc_grams):
        for g in grams:
            col = index.get(g)
            if col is not None:
                tf[row, col] += 1.0

    df = np.count_nonzero(tf > 0, axis=0).astype(np.float64)
    idf = np.zeros(len(vocab), dtype=np.float64)
    present = df > 0
    idf[present] = np.log(n_docs / df[present])
    return tf * idf, vocab


def relevance_count(
    token_lists: Iterable[Sequence[str]],
    intent_tokens: Sequence[str],
    mode: str = "all",
) -> int:
    """Count documents matching the intent's normalized tokens.

    ``mode='all'`` requires every intent token to appear in the document;
    ``mode='any'`` requires at least one.
    """
    if mode not in ("all", "any"):
        raise ValueError(f"unknown relevance mode {mode!r}")
    needles = set(intent_tokens)
    if not needles:
        raise ValueError("intent_tokens must be non-empty")
    count = 0
    for tokens in token_lists:
        have = needles.intersection(tokens)
        if (mode == "all" and len(have) == len(needles)) or (mode == "any" and have):
            count += 1
    return count
