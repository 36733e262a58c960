from __future__ import annotations

import json
from pathlib import Path
from random import Random

import pytest

from distortsearch import datapaths
from distortsearch.lexicon import Lexicon, load_lexicon
from distortsearch.searchsim import Document, SearchIndex, load_ads, load_corpus
from distortsearch.textmine import load_stopwords


@pytest.fixture(scope="session")
def lexicon() -> Lexicon:
    return load_lexicon(datapaths.lexicon_path())


@pytest.fixture(scope="session")
def stopwords() -> frozenset[str]:
    return load_stopwords(datapaths.stopwords_path())


@pytest.fixture(scope="session")
def synth_corpus():
    return load_corpus(datapaths.corpus_path())


@pytest.fixture(scope="session")
def synth_index(synth_corpus, stopwords) -> SearchIndex:
    return SearchIndex(synth_corpus, stopwords)


@pytest.fixture(scope="session")
def ad_inventory():
    return load_ads(datapaths.ads_path())


@pytest.fixture
def rng() -> Random:
    return Random(12345)


TINY_DOCS = [
    # id, title, snippet, categories
    ("T1", "toyota corolla deal", "buy a toyota corolla 2014 today", ("cars",)),
    ("T2", "toyota prices", "toyota 2014 listings and toyota news", ("cars",)),
    ("T3", "coffee guide", "arabica coffee brewing guide", ("shopping",)),
    ("T4", "premier league recap", "premier league weekend recap", ("news",)),
    ("T5", "coffee market", "coffee futures and coffee exports", ("shopping",)),
]


@pytest.fixture(scope="session")
def tiny_corpus() -> list[Document]:
    return [
        Document(id=i, url=f"https://example.test/{i.lower()}", title=t, snippet=s, categories=c)
        for i, t, s, c in TINY_DOCS
    ]


@pytest.fixture(scope="session")
def tiny_index(tiny_corpus, stopwords) -> SearchIndex:
    return SearchIndex(tiny_corpus, stopwords)


def write_jsonl(path: Path, records: list[dict]) -> Path:
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
        encoding="utf-8",
    )
    return path
