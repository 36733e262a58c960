"""Local search-engine stand-in: corpus, ranked retrieval, and ad serving.

Retrieval is additive TF-IDF over an inverted index of each document's
title and snippet. Ads are sampled per impression: first a category drawn
proportionally to the interest profile, then a uniform ad within it.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._kernels import accumulate_scores
from .textmine import normalize_tokens

logger = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Raised for malformed corpus or ad inventory files."""


@dataclass(frozen=True)
class Document:
    id: str
    url: str
    title: str
    snippet: str
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class Ad:
    id: str
    text: str
    category: str
    specific_tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScoredDoc:
    doc: Document
    score: float


def _read_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: expected an object")
            yield lineno, record


def _field(record: dict, name: str, path: Path, lineno: int) -> object:
    if name not in record:
        raise CorpusError(f"{path}:{lineno}: missing field {name!r}")
    return record[name]


def load_corpus(path: str | Path) -> list[Document]:
    """Load documents from JSONL; errors carry the offending line number."""
    path = Path(path)
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, record in _read_jsonl(path):
        doc_id = str(_field(record, "id", path, lineno))
        if doc_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
        seen.add(doc_id)
        cats = _field(record, "categories", path, lineno)
        if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
            raise CorpusError(f"{path}:{lineno}: 'categories' must be a string array")
        docs.append(
            Document(
                id=doc_id,
                url=str(_field(record, "url", path, lineno)),
                title=str(_field(record, "title", path, lineno)),
                snippet=str(_field(record, "snippet", path, lineno)),
                categories=tuple(cats),
            )
        )
    if not docs:
        raise CorpusError(f"{path}: corpus is empty")
    return docs


def load_ads(path: str | Path) -> list[Ad]:
    """Load the ad inventory from JSONL with line-numbered validation."""
    path = Path(path)
    ads: list[Ad] = []
    seen: set[str] = set()
    for lineno, record in _read_jsonl(path):
        ad_id = str(_field(record, "id", path, lineno))
        if ad_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate ad id {ad_id!r}")
        seen.add(ad_id)
        tags = _field(record, "specific_tags", path, lineno)
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise CorpusError(f"{path}:{lineno}: 'specific_tags' must be a string array")
        category = str(_field(record, "category", path, lineno))
        if not category:
            raise CorpusError(f"{path}:{lineno}: 'category' must be non-empty")
        ads.append(
            Ad(
                id=ad_id,
                text=str(_field(record, "text", path, lineno)),
                category=category,
                specific_tags=tuple(tags),
            )
        )
    if not ads:
        raise CorpusError(f"{path}: ad inventory is empty")
    return ads


class SearchIndex:
    """Inverted index over normalized title+snippet tokens."""

    def __init__(self, docs: Sequence[Document], stopwords: frozenset[str]) -> None:
        if not docs:
            raise ValueError("cannot index an empty corpus")
        self.docs = list(docs)
        self.stopwords = stopwords
        self.doc_tokens: list[list[str]] = [
            normalize_tokens(f"{d.title} {d.snippet}", stopwords) for d in self.docs
        ]
        postings: dict[str, dict[int, int]] = {}
        for row, tokens in enumerate(self.doc_tokens):
            for tok in tokens:
                postings.setdefault(tok, {}).setdefault(row, 0)
                postings[tok][row] += 1
        n = len(self.docs)
        self._postings: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        self._idf: dict[str, float] = {}
        for tok, by_doc in postings.items():
            rows = np.fromiter(sorted(by_doc), dtype=np.int64, count=len(by_doc))
            tfs = np.array([by_doc[r] for r in rows], dtype=np.float64)
            self._postings[tok] = (rows, tfs)
            self._idf[tok] = float(np.log(n / len(by_doc)))

    def __len__(self) -> int:
        return len(self.docs)

    def idf(self, token: str) -> float:
        return self._idf.get(token, 0.0)

    def query_tokens(self, query_text: str) -> list[str]:
        return normalize_tokens(query_text, self.stopwords)

    def execute(self, query_text: str, top_k: int = 100) -> list[ScoredDoc]:
        """Rank documents for a query string.

        Each query token contributes ``tf(token, doc) * ln(N / df(token))``
        per occurrence in the query. Only documents with positive score are
        returned, ordered by score descending then document id ascending,
        truncated to ``top_k``.
        """
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        scores = np.zeros(len(self.docs), dtype=np.float64)
        for tok in self.query_tokens(query_text):
            posting = self._postings.get(tok)
            if posting is None:
                continue
            rows, tfs = posting
            accumulate_scores(scores, rows, tfs * self._idf[tok])
        hits = np.flatnonzero(scores > 0)
        ranked = sorted(
            ((self.docs[i], float(scores[i])) for i in hits),
            key=lambda pair: (-pair[1], pair[0].id),
        )
        return [ScoredDoc(doc=d, score=s) for d, s in ranked[:top_k]]


def sample_ads(
    ads: Sequence[Ad],
    profile: Mapping[str, float],
    count: int,
    rng: Random,
) -> list[Ad]:
    """Draw ``count`` ad impressions (with replacement) against a profile.

    For each impression a category is chosen with probability proportional
    to its profile weight, then an ad uniformly within that category.
    Profile categories without inventory are dropped (with a warning); when
    nothing usable remains, impressions fall back to a uniform draw over the
    whole inventory.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if not ads:
        raise ValueError("ad inventory is empty")
    by_category: dict[str, list[Ad]] = {}
    for ad in ads:
        by_category.setdefault(ad.category, []).append(ad)

    usable: dict[str, float] = {}
    for category in sorted(profile):
        weight = profile[category]
        if weight <= 0:
            continue
        if category not in by_category:
            logger.warning("profile category %r has no ads; ignoring", category)
            continue
        usable[category] = float(weight)

    categories = sorted(usable)
    weights = [usable[c] for c in categories]
    total = sum(weights)

    chosen: list[Ad] = []
    for _ in range(count):
        if total > 0:
            r = rng.random() * total
            acc = 0.0
            picked = categories[-1]
            for category, weight in zip(categories, weights):
                acc += weight
                if r < acc:
                    picked = category
                    break
            pool = by_category[picked]
        else:
            pool = list(ads)
        chosen.append(pool[rng.randrange(len(pool))])
    return chosen
