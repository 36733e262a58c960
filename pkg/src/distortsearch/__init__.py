"""distortsearch: query-type permutation obfuscation for private web search.

Generates obfuscated search queries by permuting the five query-type
categories (navigational, informational, transactional, natural-language,
temporal), executes them against a simulated engine, plans k-anonymized
strategic clicks into a distorted pseudo-profile, and measures privacy via
retrieval precision/recall, classifier distinguishability, and
specific-intent ad exposure.
"""
from __future__ import annotations

from ._kernels import USING_NUMBA, backend_name
from .attack import (
    AccuracyReport,
    AttackDataset,
    LabeledQueryVector,
    build_attack_dataset,
    cross_validate,
    euclidean,
    ingest_query_log,
    knn_classify,
    make_fold_plan,
    nb_classify,
)
from .experiment import ExperimentConfig, ExperimentError, ExperimentReport, run_experiment
from .lexicon import Keyword, Lexicon, QueryCategory, VerbGraph, decoy_candidates, load_lexicon, related_verbs
from .metrics import QueryOutcome, median_precision, precision, recall
from .obfuscate import (
    DEFAULT_PATTERN_SET,
    ObfuscatedQuery,
    assemble_query,
    categorize,
    count_permutations,
    enumerate_arrangements,
    generate_batch,
    parse_pattern,
    parse_pattern_set,
    read_batch,
    write_batch,
)
from .report import emit_report, load_report
from .searchsim import Ad, Document, ScoredDoc, SearchIndex, load_ads, load_corpus, sample_ads
from .session import (
    ClickEvent,
    ClickPolicy,
    ExposureReport,
    PseudoProfile,
    exposure_report,
    plan_clicks,
    run_session,
    update_profile,
)
from .textmine import build_matrix, load_stopwords, ngrams, normalize_tokens, relevance_count

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "Ad",
    "AttackDataset",
    "ClickEvent",
    "ClickPolicy",
    "DEFAULT_PATTERN_SET",
    "Document",
    "ExperimentConfig",
    "ExperimentError",
    "ExperimentReport",
    "ExposureReport",
    "Keyword",
    "LabeledQueryVector",
    "Lexicon",
    "ObfuscatedQuery",
    "PseudoProfile",
    "QueryCategory",
    "QueryOutcome",
    "ScoredDoc",
    "SearchIndex",
    "USING_NUMBA",
    "VerbGraph",
    "assemble_query",
    "backend_name",
    "build_attack_dataset",
    "build_matrix",
    "categorize",
    "count_permutations",
    "cross_validate",
    "decoy_candidates",
    "emit_report",
    "enumerate_arrangements",
    "euclidean",
    "exposure_report",
    "generate_batch",
    "ingest_query_log",
    "knn_classify",
    "load_ads",
    "load_corpus",
    "load_lexicon",
    "load_report",
    "load_stopwords",
    "make_fold_plan",
    "median_precision",
    "nb_classify",
    "ngrams",
    "normalize_tokens",
    "parse_pattern",
    "parse_pattern_set",
    "plan_clicks",
    "precision",
    "read_batch",
    "recall",
    "related_verbs",
    "relevance_count",
    "run_experiment",
    "run_session",
    "sample_ads",
    "update_profile",
    "write_batch",
]
