"""Locations of the bundled data files.

``DISTORT_DATA_DIR`` overrides the packaged data directory wholesale.
"""
from __future__ import annotations

import os
from pathlib import Path

_PACKAGED = Path(__file__).resolve().parent / "data"

ENV_VAR = "DISTORT_DATA_DIR"


def data_dir() -> Path:
    override = os.environ.get(ENV_VAR, "").strip()
    return Path(override) if override else _PACKAGED


def lexicon_path() -> Path:
    return data_dir() / "lexicon.json"


def stopwords_path() -> Path:
    return data_dir() / "stopwords.txt"


def corpus_path() -> Path:
    return data_dir() / "corpus_synth.jsonl"


def ads_path() -> Path:
    return data_dir() / "ads.jsonl"


def precision_corpus_path() -> Path:
    return data_dir() / "corpus_precision.jsonl"


def real_queries_path() -> Path:
    return data_dir() / "real_queries.tsv"


def attack_fixture_path() -> Path:
    return data_dir() / "attack_obfuscated_v1.jsonl"


# Frozen parameters of the shipped precision-demo fixture: one NITP query,
# assembled with this seed against the bundled lexicon, retrieves exactly
# 106 documents (53 relevant) from corpus_precision.jsonl.
PRECISION_DEMO_INTENT = "buy a toyota 2014"
PRECISION_DEMO_PATTERN = "NITP"
PRECISION_DEMO_SEED = 1702
PRECISION_DEMO_TOP_K = 150
