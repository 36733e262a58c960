"""Distinguishability attack: can a classifier tell obfuscated queries
from real ones?

Queries are vectorized as TF-IDF micro-documents over one shared
vocabulary, labeled 0 (obfuscated/dummy) or 1 (real), and evaluated with
k-nearest-neighbor or multinomial Naïve Bayes under stratified k-fold
cross-validation. Lower accuracy means better obfuscation.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._kernels import pairwise_sq_dists
from .obfuscate import read_batch
from .textmine import build_matrix, normalize_tokens

logger = logging.getLogger(__name__)

KNOWN_CLASSIFIERS = ("knn", "nb", "rf", "logreg")
_RESERVED_CLASSIFIERS = ("rf", "logreg")


@dataclass(frozen=True)
class LabeledQueryVector:
    query_id: str
    vector: np.ndarray
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError("label must be 0 (obfuscated) or 1 (real)")


@dataclass(frozen=True)
class AttackDataset:
    """Vectorized, labeled query collection sharing one vocabulary."""

    vocabulary: tuple[str, ...]
    matrix: np.ndarray
    query_ids: tuple[str, ...]
    labels: np.ndarray

    def __post_init__(self) -> None:
        n, v = self.matrix.shape
        if v != len(self.vocabulary):
            raise ValueError("matrix width must equal vocabulary size")
        if n != len(self.query_ids) or n != len(self.labels):
            raise ValueError("matrix, query_ids, and labels must align")
        if len(set(self.query_ids)) != n:
            raise ValueError("query_ids must be unique")
        if not set(np.unique(self.labels)) <= {0, 1}:
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.query_ids)

    @property
    def items(self) -> list[LabeledQueryVector]:
        return [
            LabeledQueryVector(qid, self.matrix[i], int(self.labels[i]))
            for i, qid in enumerate(self.query_ids)
        ]


def build_attack_dataset(
    labeled_texts: Sequence[tuple[str, str, int]],
    stopwords: frozenset[str] = frozenset(),
    ngram_max: int = 1,
) -> AttackDataset:
    """Vectorize (query_id, text, label) triples over a shared vocabulary."""
    if not labeled_texts:
        raise ValueError("need at least one labeled query")
    token_lists = [normalize_tokens(text, stopwords) for _, text, _ in labeled_texts]
    matrix, vocab = build_matrix(token_lists, ngram_max=ngram_max)
    return AttackDataset(
        vocabulary=tuple(vocab),
        matrix=matrix,
        query_ids=tuple(qid for qid, _, _ in labeled_texts),
        labels=np.array([label for _, _, label in labeled_texts], dtype=np.int64),
    )


def euclidean(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Euclidean distance between two equal-length weight vectors."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError(f"vector lengths differ: {xa.shape} vs {ya.shape}")
    return math.sqrt(pairwise_sq_dists(xa[None, :], ya[None, :])[0, 0])


def _knn_votes(
    sq_dists: np.ndarray,
    train_ids: Sequence[str],
    train_labels: np.ndarray,
    k: int,
) -> int:
    order = sorted(range(len(train_ids)), key=lambda j: (sq_dists[j], train_ids[j]))
    votes = train_labels[order[:k]]
    ones = int(votes.sum())
    return 1 if ones * 2 > k else 0


def knn_classify(train: Sequence[LabeledQueryVector], probe: np.ndarray, k: int = 3) -> int:
    """Majority label among the k nearest training vectors.

    Distance ties break by query_id ascending; k must be odd so the vote
    itself cannot tie.
    """
    if not train:
        raise ValueError("training set is empty")
    if k < 1 or k > len(train):
        raise ValueError(f"k must be in [1, {len(train)}]")
    if k % 2 == 0:
        raise ValueError("k must be odd to avoid label ties")
    probe = np.asarray(probe, dtype=np.float64)
    train_x = np.stack([item.vector for item in train]).astype(np.float64)
    if probe.shape[0] != train_x.shape[1]:
        raise ValueError("probe length does not match training vectors")
    sq = pairwise_sq_dists(probe[None, :], train_x)[0]
    labels = np.array([item.label for item in train], dtype=np.int64)
    ids = [item.query_id for item in train]
    return _knn_votes(sq, ids, labels, k)


def nb_classify(train: Sequence[LabeledQueryVector], probe: np.ndarray) -> int:
    """Multinomial Naïve Bayes with add-one smoothing over the vocabulary.

    Posterior ties resolve to the lower label.
    """
    if not train:
        raise ValueError("training set is empty")
    labels = {item.label for item in train}
    if labels != {0, 1}:
        raise ValueError("training set must contain both labels")
    probe = np.asarray(probe, dtype=np.float64)
    v = probe.shape[0]
    n = len(train)
    best_label = 0
    best_score = -math.inf
    for label in (0, 1):
        members = [item.vector for item in train if item.label == label]
        feature_mass = np.zeros(v, dtype=np.float64)
        for vec in members:
            feature_mass += vec
        conditional = (feature_mass + 1.0) / (feature_mass.sum() + v)
        score = math.log(len(members) / n) + float(probe @ np.log(conditional))
        if score > best_score:
            best_score = score
            best_label = label
    return best_label


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic stratified fold assignment keyed by query_id hashes."""

    folds: int
    assignment: tuple[int, ...]
    seed: int

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        used = set(self.assignment)
        if not used <= set(range(self.folds)):
            raise ValueError("assignment references an unknown fold")
        sizes = [self.assignment.count(f) for f in range(self.folds)]
        if max(sizes) - min(sizes) > 1:
            raise ValueError("fold sizes must differ by at most 1")


def _fold_hash(seed: int, query_id: str) -> str:
    return hashlib.sha256(f"{seed}:{query_id}".encode("utf-8")).hexdigest()


def make_fold_plan(dataset: AttackDataset, folds: int, seed: int) -> FoldPlan:
    """Stratified assignment, order-independent for a fixed seed.

    Items are bucketed by label, ordered inside each bucket by a hash of
    (seed, query_id), and dealt round-robin; the deal position chains
    across buckets so overall fold sizes stay within 1 of each other.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > len(dataset):
        raise ValueError("more folds than items")
    assignment = [0] * len(dataset)
    cursor = 0
    for label in (0, 1):
        rows = [i for i in range(len(dataset)) if dataset.labels[i] == label]
        if len(rows) < 2:
            raise ValueError(
                f"label {label} has {len(rows)} item(s); need >= 2 so every "
                "training split contains both labels"
            )
        rows.sort(key=lambda i: _fold_hash(seed, dataset.query_ids[i]))
        for row in rows:
            assignment[row] = cursor % folds
            cursor += 1
    return FoldPlan(folds=folds, assignment=tuple(assignment), seed=seed)


@dataclass(frozen=True)
class AccuracyReport:
    classifier: str
    folds: int
    overall_accuracy: float
    per_fold: tuple[float, ...]
    confusion: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "folds": self.folds,
            "overall_accuracy": self.overall_accuracy,
            "per_fold": list(self.per_fold),
            "confusion": dict(self.confusion),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def cross_validate(
    dataset: AttackDataset,
    classifier: str = "knn",
    plan: FoldPlan | None = None,
    folds: int = 10,
    seed: int = 0,
    k: int = 3,
) -> AccuracyReport:
    """Stratified k-fold evaluation of one classifier over the dataset.

    Label 1 (real) is the positive class for the confusion counts. The
    report is deterministic for a fixed seed and invariant to item order.
    """
    if classifier in _RESERVED_CLASSIFIERS:
        raise NotImplementedError(
            f"classifier {classifier!r} is reserved but not implemented"
        )
    if classifier not in KNOWN_CLASSIFIERS:
        raise ValueError(f"unknown classifier {classifier!r}")
    if plan is None:
        plan = make_fold_plan(dataset, folds, seed)
    if len(plan.assignment) != len(dataset):
        raise ValueError("fold plan does not match dataset size")

    assignment = np.array(plan.assignment, dtype=np.int64)
    correct_total = 0
    per_fold: list[float] = []
    confusion = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    for fold in range(plan.folds):
        test_rows = np.flatnonzero(assignment == fold)
        train_rows = np.flatnonzero(assignment != fold)
        train_labels = dataset.labels[train_rows]
        if set(np.unique(train_labels)) != {0, 1}:
            raise ValueError(f"fold {fold}: training split lacks a label")
        predictions = _predict_fold(dataset, train_rows, test_rows, classifier, k)
        truth = dataset.labels[test_rows]
        correct = int((predictions == truth).sum())
        correct_total += correct
        per_fold.append(correct / len(test_rows))
        confusion["tp"] += int(((predictions == 1) & (truth == 1)).sum())
        confusion["tn"] += int(((predictions == 0) & (truth == 0)).sum())
        confusion["fp"] += int(((predictions == 1) & (truth == 0)).sum())
        confusion["fn"] += int(((predictions == 0) & (truth == 1)).sum())

    return AccuracyReport(
        classifier=classifier,
        folds=plan.folds,
        overall_accuracy=correct_total / len(dataset),
        per_fold=tuple(per_fold),
        confusion=confusion,
    )


def _predict_fold(
    dataset: AttackDataset,
    train_rows: np.ndarray,
    test_rows: np.ndarray,
    classifier: str,
    k: int,
) -> np.ndarray:
    train_x = dataset.matrix[train_rows]
    test_x = dataset.matrix[test_rows]
    train_labels = dataset.labels[train_rows]
    predictions = np.empty(len(test_rows), dtype=np.int64)
    if classifier == "knn":
        if k % 2 == 0:
            raise ValueError("k must be odd to avoid label ties")
        if k > len(train_rows):
            raise ValueError("k exceeds training split size")
        train_ids = [dataset.query_ids[i] for i in train_rows]
        sq = pairwise_sq_dists(test_x, train_x)
        for t in range(len(test_rows)):
            predictions[t] = _knn_votes(sq[t], train_ids, train_labels, k)
    else:
        # same math as nb_classify, batched per fold instead of per probe
        v = dataset.matrix.shape[1]
        scores = np.empty((2, len(test_rows)), dtype=np.float64)
        for label in (0, 1):
            members = train_rows[train_labels == label]
            feature_mass = dataset.matrix[members].sum(axis=0)
            conditional = (feature_mass + 1.0) / (feature_mass.sum() + v)
            prior = math.log(len(members) / len(train_rows))
            scores[label] = prior + test_x @ np.log(conditional)
        predictions[:] = (scores[1] > scores[0]).astype(np.int64)
    return predictions


def ingest_query_log(
    path: str | Path, label: int, format: str = "tsv-queries"
) -> list[tuple[str, str, int]]:
    """Extract (query_id, text, label) triples from a query log.

    ``tsv-queries`` reads the query column of AnonID/Query/QueryTime rows
    (header row optional); ``jsonl-obfuscated`` reads rendered obfuscated
    batches. Malformed rows are skipped with a per-line warning.
    """
    path = Path(path)
    if label not in (0, 1):
        raise ValueError("label must be 0 or 1")
    if format == "jsonl-obfuscated":
        return [(q.id, q.text, label) for q in read_batch(path)]
    if format != "tsv-queries":
        raise ValueError(f"unknown query-log format {format!r}")

    out: list[tuple[str, str, int]] = []
    skipped = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if lineno == 1 and len(cols) >= 2 and cols[1].strip().lower() == "query":
                continue
            if len(cols) < 2 or not cols[1].strip():
                logger.warning("%s:%d: missing query column; row skipped", path, lineno)
                skipped += 1
                continue
            out.append((f"A{lineno}", cols[1].strip(), label))
    if skipped:
        logger.info("%s: skipped %d malformed row(s)", path, skipped)
    return out


def merge_datasets(
    *parts: Iterable[tuple[str, str, int]],
    stopwords: frozenset[str] = frozenset(),
    ngram_max: int = 1,
) -> AttackDataset:
    """Concatenate labeled-text collections and vectorize them jointly."""
    combined: list[tuple[str, str, int]] = []
    for part in parts:
        combined.extend(part)
    return build_attack_dataset(combined, stopwords=stopwords, ngram_max=ngram_max)
