from __future__ import annotations

import json

import pytest

from distortsearch.experiment import (
    RELEVANCE_MODES,
    ExperimentConfig,
    ExperimentError,
    ExperimentReport,
    run_experiment,
)


@pytest.fixture(scope="module")
def default_report() -> ExperimentReport:
    return run_experiment(ExperimentConfig(seed=7))


class TestConfig:
    def test_defaults_valid(self):
        cfg = ExperimentConfig()
        assert cfg.intent == "buy a toyota 2014"
        assert cfg.relevance_mode == "all"

    def test_relevance_modes(self):
        assert RELEVANCE_MODES == {"tokens-all": "all", "single-token": "any"}
        assert ExperimentConfig(relevance="single-token").relevance_mode == "any"
        with pytest.raises(ValueError, match="relevance"):
            ExperimentConfig(relevance="sideways")

    def test_missing_path_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="corpus"):
            ExperimentConfig(corpus=tmp_path / "nope.jsonl")

    def test_with_overrides(self):
        cfg = ExperimentConfig().with_overrides(seed=99, days=2)
        assert cfg.seed == 99 and cfg.days == 2
        assert cfg.intent == "buy a toyota 2014"


class TestRunExperiment:
    def test_query_count_and_ids(self, default_report):
        assert default_report.metadata["queries"] == 121
        assert len(default_report.per_query) == 121
        ids = [row["query_id"] for row in default_report.per_query]
        assert len(set(ids)) == 121

    def test_per_query_row_shape(self, default_report):
        row = default_report.per_query[0]
        assert set(row) == {
            "query_id",
            "pattern",
            "retrieved",
            "relevant",
            "precision",
            "recall",
            "no_results",
        }

    def test_relevant_total_on_bundled_corpus(self, default_report):
        assert default_report.relevant_total == 60

    def test_attack_reports_present(self, default_report):
        assert set(default_report.attack) == {"knn", "nb"}
        for rep in default_report.attack.values():
            assert rep["folds"] == 10
            assert 0.0 <= rep["overall_accuracy"] <= 1.0

    def test_exposure_shape(self, default_report):
        exp = default_report.exposure
        assert exp["total_ads"] == 7 * 42
        assert 0 <= exp["specific_ads"] <= exp["total_ads"]
        assert exp["exposure"] == exp["specific_ads"] / exp["total_ads"]

    def test_metadata_has_no_timestamps(self, default_report):
        meta_json = json.dumps(default_report.metadata)
        assert "time" not in meta_json.lower()
        assert "date" not in meta_json.lower()
        assert set(default_report.metadata["stage_seeds"]) == {"batch", "session", "attack"}

    def test_deterministic_to_dict(self, default_report):
        again = run_experiment(ExperimentConfig(seed=7))
        assert json.dumps(again.to_dict(), sort_keys=True) == json.dumps(
            default_report.to_dict(), sort_keys=True
        )

    def test_seed_changes_output(self, default_report):
        other = run_experiment(ExperimentConfig(seed=8, classifiers=()))
        assert other.per_query != default_report.per_query

    def test_classifiers_can_be_disabled(self):
        report = run_experiment(ExperimentConfig(seed=3, classifiers=()))
        assert report.attack == {}

    def test_stage_error_names_stage(self, tmp_path):
        bad = tmp_path / "corpus.jsonl"
        bad.write_text("this is not json\n")
        cfg = ExperimentConfig(corpus=bad)
        with pytest.raises(ExperimentError, match="stage 'load-corpus' failed"):
            run_experiment(cfg)

    def test_round_trip_via_dict(self, default_report):
        clone = ExperimentReport.from_dict(
            json.loads(json.dumps(default_report.to_dict()))
        )
        assert clone.to_dict() == default_report.to_dict()

    def test_reserved_classifier_propagates(self):
        cfg = ExperimentConfig(classifiers=("rf",))
        with pytest.raises(ExperimentError, match="stage 'attack' failed"):
            run_experiment(cfg)

    def test_baseline_single_pattern_config(self):
        report = run_experiment(
            ExperimentConfig(seed=5, patterns="T", decoy_fraction=0.0, classifiers=())
        )
        # bare-T pattern on a transactional intent: every query is the intent
        assert report.metadata["queries"] == 9  # 8 per pattern + original
        assert all(row["retrieved"] == 60 for row in report.per_query)
        assert all(row["precision"] == 1.0 for row in report.per_query)
