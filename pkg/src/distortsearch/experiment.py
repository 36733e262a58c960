"""Full-pipeline experiment runner.

One run: generate the obfuscated batch, execute every query, score
retrieval quality, play out the click session with ad impressions, run the
distinguishability attack against a real-query log, and assemble a single
deterministic report.
"""
from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from random import Random
from typing import Iterator

import numpy as np

from . import datapaths
from ._kernels import backend_name
from .attack import AccuracyReport, cross_validate, ingest_query_log, merge_datasets
from .lexicon import load_lexicon
from .metrics import QueryOutcome, recall
from .obfuscate import generate_batch, parse_pattern_set
from .searchsim import SearchIndex, load_ads, load_corpus
from .session import ClickPolicy, run_session
from .textmine import load_stopwords, normalize_tokens, relevance_count

RELEVANCE_MODES = {"tokens-all": "all", "single-token": "any"}


class ExperimentError(RuntimeError):
    """A pipeline stage failed; message carries the stage name and cause."""


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except ExperimentError:
        raise
    except Exception as exc:
        raise ExperimentError(f"stage '{name}' failed: {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    intent: str = "buy a toyota 2014"
    patterns: str | None = None  # None selects the default 15-pattern set
    per_pattern: int = 8
    include_original: bool = True
    top_k: int = 100
    k_clicks: int = 2
    decoy_fraction: float = 0.5
    include_ads: bool = True
    days: int = 7
    ads_per_day: int = 42
    seed: int = 7
    relevance: str = "tokens-all"
    classifiers: tuple[str, ...] = ("knn", "nb")
    attack_k: int = 3
    attack_folds: int = 10
    corpus: Path = field(default_factory=datapaths.corpus_path)
    ads: Path = field(default_factory=datapaths.ads_path)
    lexicon: Path = field(default_factory=datapaths.lexicon_path)
    stopwords: Path = field(default_factory=datapaths.stopwords_path)
    real_log: Path = field(default_factory=datapaths.real_queries_path)

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.per_pattern < 1:
            raise ValueError("per_pattern must be >= 1")
        if self.relevance not in RELEVANCE_MODES:
            raise ValueError(
                f"relevance must be one of {sorted(RELEVANCE_MODES)}, got {self.relevance!r}"
            )
        for name in ("corpus", "ads", "lexicon", "stopwords", "real_log"):
            path = getattr(self, name)
            if not Path(path).is_file():
                raise FileNotFoundError(f"config path {name} does not exist: {path}")

    @property
    def relevance_mode(self) -> str:
        return RELEVANCE_MODES[self.relevance]

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    per_query: tuple[dict, ...]
    batch_recall: float | None
    relevant_total: int
    attack: dict[str, dict]
    exposure: dict
    profile: dict
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "per_query": list(self.per_query),
            "batch_recall": self.batch_recall,
            "relevant_total": self.relevant_total,
            "attack": self.attack,
            "exposure": self.exposure,
            "profile": self.profile,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentReport":
        return cls(
            config=raw["config"],
            per_query=tuple(raw["per_query"]),
            batch_recall=raw["batch_recall"],
            relevant_total=raw["relevant_total"],
            attack=raw["attack"],
            exposure=raw["exposure"],
            profile=raw["profile"],
            metadata=raw["metadata"],
        )


def _config_dict(config: ExperimentConfig) -> dict:
    return {
        "intent": config.intent,
        "patterns": config.patterns,
        "per_pattern": config.per_pattern,
        "include_original": config.include_original,
        "top_k": config.top_k,
        "k_clicks": config.k_clicks,
        "decoy_fraction": config.decoy_fraction,
        "include_ads": config.include_ads,
        "days": config.days,
        "ads_per_day": config.ads_per_day,
        "seed": config.seed,
        "relevance": config.relevance,
        "classifiers": list(config.classifiers),
        "attack_k": config.attack_k,
        "attack_folds": config.attack_folds,
        "corpus": str(config.corpus),
        "ads": str(config.ads),
        "lexicon": str(config.lexicon),
        "stopwords": str(config.stopwords),
        "real_log": str(config.real_log),
    }


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Execute the whole pipeline for one config; deterministic per seed.

    Any stage failure aborts the run with the stage name and original
    cause; no artifacts are written by this function.
    """
    master = Random(config.seed)
    batch_seed = master.getrandbits(64)
    session_seed = master.getrandbits(64)
    attack_seed = master.getrandbits(64)

    with _stage("load-lexicon"):
        lexicon = load_lexicon(config.lexicon)
    with _stage("load-stopwords"):
        stopwords = load_stopwords(config.stopwords)
    with _stage("load-corpus"):
        corpus = load_corpus(config.corpus)
        index = SearchIndex(corpus, stopwords)
    with _stage("load-ads"):
        inventory = load_ads(config.ads)

    with _stage("generate"):
        patterns = None if config.patterns is None else parse_pattern_set(config.patterns)
        batch = generate_batch(
            config.intent,
            lexicon,
            seed=batch_seed,
            patterns=patterns,
            per_pattern=config.per_pattern,
            include_original=config.include_original,
        )

    with _stage("retrieve"):
        intent_tokens = normalize_tokens(config.intent, stopwords)
        relevant_total = relevance_count(
            index.doc_tokens, intent_tokens, mode=config.relevance_mode
        )
        needles = set(intent_tokens)
        doc_row = {doc.id: row for row, doc in enumerate(index.docs)}
        outcomes: list[QueryOutcome] = []
        per_query: list[dict] = []
        relevant_doc_union: set[str] = set()
        for query in batch:
            page = index.execute(query.text, top_k=config.top_k)
            hits_relevant = []
            for hit in page:
                tokens = set(index.doc_tokens[doc_row[hit.doc.id]])
                ok = bool(needles & tokens) if config.relevance_mode == "any" else needles <= tokens
                if ok:
                    hits_relevant.append(hit.doc.id)
            relevant_doc_union.update(hits_relevant)
            outcome = QueryOutcome(
                query_id=query.id,
                retrieved=len(page),
                relevant_retrieved=len(hits_relevant),
                relevant_total=relevant_total,
            )
            outcomes.append(outcome)
            per_query.append(
                {
                    "query_id": query.id,
                    "pattern": query.pattern,
                    "retrieved": outcome.retrieved,
                    "relevant": outcome.relevant_retrieved,
                    "precision": outcome.precision,
                    "recall": outcome.recall,
                    "no_results": outcome.no_results,
                }
            )
        batch_recall = (
            recall(len(relevant_doc_union), relevant_total) if relevant_total else None
        )

    with _stage("session"):
        policy = ClickPolicy(
            k_clicks=config.k_clicks,
            decoy_fraction=config.decoy_fraction,
            include_ads=config.include_ads,
        )
        profile, exposure, _log = run_session(
            config.intent,
            batch,
            index,
            inventory,
            policy,
            days=config.days,
            ads_per_day=config.ads_per_day,
            rng=Random(session_seed),
            top_k=config.top_k,
            relevance_mode=config.relevance_mode,
        )

    with _stage("attack"):
        obfuscated = [(q.id, q.text, 0) for q in batch]
        real = ingest_query_log(config.real_log, label=1, format="tsv-queries")
        dataset = merge_datasets(obfuscated, real, stopwords=stopwords)
        attack_reports: dict[str, AccuracyReport] = {}
        for classifier in config.classifiers:
            attack_reports[classifier] = cross_validate(
                dataset,
                classifier=classifier,
                folds=config.attack_folds,
                seed=attack_seed,
                k=config.attack_k,
            )

    with _stage("assemble"):
        report = ExperimentReport(
            config=_config_dict(config),
            per_query=tuple(per_query),
            batch_recall=batch_recall,
            relevant_total=relevant_total,
            attack={name: rep.to_dict() for name, rep in attack_reports.items()},
            exposure=exposure.to_dict(),
            profile=profile.to_dict(),
            metadata={
                "seed": config.seed,
                "stage_seeds": {
                    "batch": batch_seed,
                    "session": session_seed,
                    "attack": attack_seed,
                },
                "kernel_backend": backend_name(),
                "python": ".".join(str(v) for v in sys.version_info[:3]),
                "numpy": np.__version__,
                "queries": len(batch),
                "corpus_docs": len(corpus),
                "ads_inventory": len(inventory),
            },
        )
    return report
