from __future__ import annotations

import logging
import math
from random import Random

import numpy as np
import pytest

from distortsearch import datapaths
from distortsearch.attack import (
    AccuracyReport,
    AttackDataset,
    FoldPlan,
    LabeledQueryVector,
    build_attack_dataset,
    cross_validate,
    euclidean,
    ingest_query_log,
    knn_classify,
    make_fold_plan,
    merge_datasets,
    nb_classify,
)

# ---------------------------------------------------------------------------
# Straight-line KNN + cross-validation oracle. Works on plain Python floats
# with sparse rows; terms accumulate in ascending-dimension order, which is
# arithmetically identical to the dense kernels (adding 0.0 never changes an
# IEEE accumulator), so agreement is expected to be exact, well inside 1e-9.
# ---------------------------------------------------------------------------


def knn_cv_oracle(dataset: AttackDataset, plan: FoldPlan, k: int):
    rows = []
    for i in range(len(dataset)):
        row = {
            j: float(dataset.matrix[i, j])
            for j in np.flatnonzero(dataset.matrix[i]).tolist()
        }
        rows.append(row)
    labels = [int(x) for x in dataset.labels]
    ids = list(dataset.query_ids)

    def sq_dist(a: dict, b: dict) -> float:
        acc = 0.0
        for dim in sorted(set(a) | set(b)):
            d = a.get(dim, 0.0) - b.get(dim, 0.0)
            acc += d * d
        return acc

    per_fold = []
    correct_total = 0
    for fold in range(plan.folds):
        test = [i for i in range(len(dataset)) if plan.assignment[i] == fold]
        train = [i for i in range(len(dataset)) if plan.assignment[i] != fold]
        correct = 0
        for t in test:
            ranked = sorted(
                ((sq_dist(rows[t], rows[j]), ids[j], labels[j]) for j in train),
                key=lambda item: (item[0], item[1]),
            )
            ones = sum(label for _, _, label in ranked[:k])
            pred = 1 if ones * 2 > k else 0
            correct += pred == labels[t]
        per_fold.append(correct / len(test))
        correct_total += correct
    return correct_total / len(dataset), per_fold


def _frozen_fixture_dataset(stopwords) -> AttackDataset:
    obfuscated = ingest_query_log(
        datapaths.attack_fixture_path(), label=0, format="jsonl-obfuscated"
    )
    real = ingest_query_log(datapaths.real_queries_path(), label=1, format="tsv-queries")
    assert len(obfuscated) == 122
    assert len(real) == 248
    return merge_datasets(obfuscated, real, stopwords=stopwords)


class TestFrozenFixtureOracle:
    def test_knn_matches_straight_line_oracle(self, stopwords):
        dataset = _frozen_fixture_dataset(stopwords)
        plan = make_fold_plan(dataset, folds=10, seed=0)
        report = cross_validate(dataset, classifier="knn", plan=plan, k=3)
        oracle_overall, oracle_folds = knn_cv_oracle(dataset, plan, k=3)
        assert abs(report.overall_accuracy - oracle_overall) <= 1e-9
        assert len(report.per_fold) == len(oracle_folds) == 10
        for got, want in zip(report.per_fold, oracle_folds):
            assert abs(got - want) <= 1e-9

    def test_confusion_totals(self, stopwords):
        dataset = _frozen_fixture_dataset(stopwords)
        report = cross_validate(dataset, classifier="knn", folds=10, seed=0, k=3)
        c = report.confusion
        assert c["tp"] + c["tn"] + c["fp"] + c["fn"] == len(dataset)
        assert c["tp"] + c["fn"] == 248  # positives are the real queries
        assert c["tn"] + c["fp"] == 122


# ---------------------------------------------------------------------------
# Synthetic geometry fixtures
# ---------------------------------------------------------------------------


def separable_dataset() -> AttackDataset:
    rng = Random(0)
    vecs, ids, labels = [], [], []
    for i in range(50):
        vecs.append([rng.random() * 0.5 for _ in range(6)])
        ids.append(f"near{i}")
        labels.append(0)
    for i in range(50):
        vecs.append([10.0 + rng.random() * 0.5 for _ in range(6)])
        ids.append(f"far{i}")
        labels.append(1)
    return AttackDataset(
        vocabulary=tuple(f"f{j}" for j in range(6)),
        matrix=np.array(vecs, dtype=np.float64),
        query_ids=tuple(ids),
        labels=np.array(labels, dtype=np.int64),
    )


def shuffled_dataset(seed: int) -> AttackDataset:
    base = separable_dataset()
    labels = list(base.labels)
    Random(seed).shuffle(labels)
    return AttackDataset(
        vocabulary=base.vocabulary,
        matrix=base.matrix,
        query_ids=base.query_ids,
        labels=np.array(labels, dtype=np.int64),
    )


class TestEuclidean:
    def test_identical_is_zero(self):
        assert euclidean([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_three_four_five(self):
        assert euclidean([0.0, 0.0], [3.0, 4.0]) == 5.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            euclidean([1.0], [1.0, 2.0])


class TestClassifiers:
    def test_knn_separable_probe(self):
        data = separable_dataset()
        assert knn_classify(data.items, np.full(6, 0.2), k=3) == 0
        assert knn_classify(data.items, np.full(6, 10.2), k=3) == 1

    def test_knn_distance_tie_breaks_by_query_id(self):
        a = LabeledQueryVector("qa", np.array([1.0, 0.0]), 0)
        b = LabeledQueryVector("qb", np.array([-1.0, 0.0]), 1)
        probe = np.zeros(2)
        assert knn_classify([a, b], probe, k=1) == 0
        a2 = LabeledQueryVector("qz", np.array([1.0, 0.0]), 0)
        assert knn_classify([a2, b], probe, k=1) == 1

    def test_knn_k_validation(self):
        data = separable_dataset()
        with pytest.raises(ValueError, match="odd"):
            knn_classify(data.items, np.zeros(6), k=2)
        with pytest.raises(ValueError):
            knn_classify(data.items, np.zeros(6), k=101)

    def test_nb_hand_example(self):
        train = [
            LabeledQueryVector("q1", np.array([3.0, 0.0]), 0),
            LabeledQueryVector("q2", np.array([2.0, 1.0]), 0),
            LabeledQueryVector("q3", np.array([0.0, 3.0]), 1),
            LabeledQueryVector("q4", np.array([1.0, 2.0]), 1),
        ]
        assert nb_classify(train, np.array([4.0, 0.0])) == 0
        assert nb_classify(train, np.array([0.0, 4.0])) == 1

    def test_nb_tie_resolves_to_label_zero(self):
        train = [
            LabeledQueryVector("q1", np.array([3.0, 0.0]), 0),
            LabeledQueryVector("q2", np.array([2.0, 1.0]), 0),
            LabeledQueryVector("q3", np.array([0.0, 3.0]), 1),
            LabeledQueryVector("q4", np.array([1.0, 2.0]), 1),
        ]
        # symmetric probe: both posteriors are the same two products summed
        assert nb_classify(train, np.array([2.0, 2.0])) == 0

    def test_nb_requires_both_labels(self):
        train = [LabeledQueryVector("q1", np.array([1.0]), 0)]
        with pytest.raises(ValueError):
            nb_classify(train, np.array([1.0]))


class TestFoldPlan:
    def test_sizes_within_one(self, stopwords):
        dataset = _frozen_fixture_dataset(stopwords)
        plan = make_fold_plan(dataset, folds=10, seed=0)
        sizes = [plan.assignment.count(f) for f in range(10)]
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == 370

    def test_stratified_per_label(self, stopwords):
        dataset = _frozen_fixture_dataset(stopwords)
        plan = make_fold_plan(dataset, folds=10, seed=0)
        for label, total in ((0, 122), (1, 248)):
            rows = [i for i in range(len(dataset)) if dataset.labels[i] == label]
            per_fold = [sum(plan.assignment[i] == f for i in rows) for f in range(10)]
            assert sum(per_fold) == total
            assert max(per_fold) - min(per_fold) <= 1

    def test_order_independent(self):
        base = separable_dataset()
        perm = Random(5).sample(range(len(base)), len(base))
        shuffled = AttackDataset(
            vocabulary=base.vocabulary,
            matrix=base.matrix[perm],
            query_ids=tuple(base.query_ids[i] for i in perm),
            labels=base.labels[perm],
        )
        plan_a = make_fold_plan(base, folds=5, seed=3)
        plan_b = make_fold_plan(shuffled, folds=5, seed=3)
        by_id_a = {base.query_ids[i]: plan_a.assignment[i] for i in range(len(base))}
        by_id_b = {
            shuffled.query_ids[i]: plan_b.assignment[i] for i in range(len(shuffled))
        }
        assert by_id_a == by_id_b

    def test_seed_changes_assignment(self):
        base = separable_dataset()
        a = make_fold_plan(base, folds=5, seed=1)
        b = make_fold_plan(base, folds=5, seed=2)
        assert a.assignment != b.assignment

    def test_small_label_rejected(self):
        data = AttackDataset(
            vocabulary=("x",),
            matrix=np.array([[1.0], [2.0], [3.0]]),
            query_ids=("a", "b", "c"),
            labels=np.array([0, 0, 1]),
        )
        with pytest.raises(ValueError, match="label 1"):
            make_fold_plan(data, folds=2, seed=0)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            FoldPlan(folds=2, assignment=(0, 0, 0, 1), seed=0)  # sizes differ by 2


class TestCrossValidate:
    def test_separable_knn_accuracy(self):
        report = cross_validate(separable_dataset(), classifier="knn", folds=10, seed=0, k=3)
        assert report.overall_accuracy >= 0.95
        assert report.folds == 10
        assert len(report.per_fold) == 10

    def test_shuffled_labels_near_chance(self):
        accs = [
            cross_validate(shuffled_dataset(seed), classifier="knn", folds=10, seed=seed, k=3).overall_accuracy
            for seed in range(20)
        ]
        mean = sum(accs) / len(accs)
        assert 0.4 <= mean <= 0.6

    def test_overall_is_weighted_fold_mean(self):
        report = cross_validate(separable_dataset(), classifier="knn", folds=10, seed=0, k=3)
        sizes = [10] * 10  # 100 items over 10 folds
        recombined = sum(a * s for a, s in zip(report.per_fold, sizes)) / 100
        assert report.overall_accuracy == pytest.approx(recombined, abs=1e-12)

    def test_row_order_invariance(self, stopwords):
        base = _frozen_fixture_dataset(stopwords)
        perm = Random(13).sample(range(len(base)), len(base))
        shuffled = AttackDataset(
            vocabulary=base.vocabulary,
            matrix=base.matrix[perm],
            query_ids=tuple(base.query_ids[i] for i in perm),
            labels=base.labels[perm],
        )
        a = cross_validate(base, classifier="knn", folds=10, seed=0, k=3)
        b = cross_validate(shuffled, classifier="knn", folds=10, seed=0, k=3)
        assert a.overall_accuracy == b.overall_accuracy
        assert a.per_fold == b.per_fold
        assert a.confusion == b.confusion

    def test_nb_on_frozen_fixture_runs(self, stopwords):
        dataset = _frozen_fixture_dataset(stopwords)
        report = cross_validate(dataset, classifier="nb", folds=10, seed=0)
        assert 0.0 <= report.overall_accuracy <= 1.0
        assert report.classifier == "nb"

    def test_nb_batched_matches_single_probe_path(self):
        # the fold loop batches NB; it must agree with nb_classify per probe
        rng = Random(21)
        vecs = [[float(rng.randrange(4)) for _ in range(5)] for _ in range(30)]
        labels = [i % 2 for i in range(30)]
        data = AttackDataset(
            vocabulary=tuple(f"w{j}" for j in range(5)),
            matrix=np.array(vecs),
            query_ids=tuple(f"q{i}" for i in range(30)),
            labels=np.array(labels, dtype=np.int64),
        )
        plan = make_fold_plan(data, folds=5, seed=4)
        report = cross_validate(data, classifier="nb", plan=plan)
        correct = 0
        for fold in range(5):
            train = [data.items[i] for i in range(30) if plan.assignment[i] != fold]
            for i in range(30):
                if plan.assignment[i] != fold:
                    continue
                pred = nb_classify(train, data.matrix[i])
                correct += pred == int(data.labels[i])
        assert report.overall_accuracy == pytest.approx(correct / 30, abs=1e-12)

    def test_reserved_classifiers(self):
        for name in ("rf", "logreg"):
            with pytest.raises(NotImplementedError):
                cross_validate(separable_dataset(), classifier=name)

    def test_unknown_classifier(self):
        with pytest.raises(ValueError):
            cross_validate(separable_dataset(), classifier="svm")

    def test_plan_size_mismatch(self):
        plan = FoldPlan(folds=2, assignment=(0, 1), seed=0)
        with pytest.raises(ValueError):
            cross_validate(separable_dataset(), classifier="knn", plan=plan)

    def test_report_serialization(self):
        report = cross_validate(separable_dataset(), classifier="knn", folds=5, seed=0, k=3)
        d = report.to_dict()
        assert set(d) == {"classifier", "folds", "overall_accuracy", "per_fold", "confusion"}
        assert AccuracyReport(**{**d, "per_fold": tuple(d["per_fold"])}).to_dict() == d


class TestIngest:
    def test_tsv_three_rows(self, tmp_path):
        p = tmp_path / "log.tsv"
        p.write_text(
            "AnonID\tQuery\tQueryTime\n"
            "111\tweather boston\t2006-03-01 08:00:00\n"
            "222\tdog breeds\t2006-03-02 09:00:00\n"
            "333\tmyspace.com\t2006-03-03 10:00:00\n"
        )
        rows = ingest_query_log(p, label=1)
        assert rows == [
            ("A2", "weather boston", 1),
            ("A3", "dog breeds", 1),
            ("A4", "myspace.com", 1),
        ]

    def test_tsv_without_header(self, tmp_path):
        p = tmp_path / "log.tsv"
        p.write_text("111\tweather boston\t2006-03-01 08:00:00\n")
        rows = ingest_query_log(p, label=1)
        assert rows == [("A1", "weather boston", 1)]

    def test_malformed_row_warned_and_skipped(self, tmp_path, caplog):
        p = tmp_path / "log.tsv"
        p.write_text(
            "AnonID\tQuery\tQueryTime\n"
            "111\tok query\t2006-03-01 08:00:00\n"
            "222-no-tabs-here\n"
            "333\t\t2006-03-03 10:00:00\n"
        )
        with caplog.at_level(logging.WARNING, logger="distortsearch.attack"):
            rows = ingest_query_log(p, label=1)
        assert [r[1] for r in rows] == ["ok query"]
        warned = [rec for rec in caplog.records if "skipped" in rec.message]
        assert len(warned) == 2

    def test_jsonl_batch(self):
        rows = ingest_query_log(datapaths.attack_fixture_path(), label=0, format="jsonl-obfuscated")
        assert len(rows) == 122
        assert rows[0][0] == "Q1"
        assert all(label == 0 for _, _, label in rows)

    def test_unknown_format(self, tmp_path):
        p = tmp_path / "x.log"
        p.write_text("")
        with pytest.raises(ValueError):
            ingest_query_log(p, label=1, format="csv")

    def test_label_validation(self, tmp_path):
        p = tmp_path / "x.tsv"
        p.write_text("1\tq\t3\n")
        with pytest.raises(ValueError):
            ingest_query_log(p, label=2)


class TestDatasetConstruction:
    def test_build_alignment(self, stopwords):
        data = build_attack_dataset(
            [("q1", "buy a toyota", 0), ("q2", "dog breeds", 1)], stopwords=stopwords
        )
        assert data.query_ids == ("q1", "q2")
        assert list(data.labels) == [0, 1]
        assert data.matrix.shape[0] == 2

    def test_duplicate_ids_rejected(self, stopwords):
        with pytest.raises(ValueError, match="unique"):
            build_attack_dataset([("q1", "a b", 0), ("q1", "c d", 1)], stopwords=stopwords)

    def test_label_values_validated(self):
        with pytest.raises(ValueError):
            build_attack_dataset([("q1", "a", 2)])

    def test_merge_concatenates(self, stopwords):
        merged = merge_datasets(
            [("q1", "buy a toyota", 0)],
            [("r1", "dog breeds", 1), ("r2", "tax refund", 1)],
            stopwords=stopwords,
        )
        assert len(merged) == 3
        assert list(merged.labels) == [0, 1, 1]
