from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from distortsearch.experiment import ExperimentConfig, run_experiment
from distortsearch.report import emit_report
from distortsearch.server import create_app

INTENT = "buy a toyota 2014"


@pytest.fixture
def client(tmp_path):
    app = create_app(seed=5, report_dir=tmp_path / "reports")
    with TestClient(app) as c:
        c.report_dir = tmp_path / "reports"
        yield c


def new_session(client) -> str:
    r = client.post("/sessions")
    assert r.status_code == 200
    return r.json()["session_id"]


class TestSessions:
    def test_ids_are_sequential(self, client):
        assert new_session(client) == "S1"
        assert new_session(client) == "S2"

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/S404/profile").status_code == 404
        assert client.post("/sessions/S404/query", json={"segments": ["x"]}).status_code == 404


class TestQueryEndpoint:
    def test_compose_preview_returns_segments_only(self, client):
        sid = new_session(client)
        r = client.post(
            f"/sessions/{sid}/query",
            json={"intent": INTENT, "pattern": "NITP", "preview": True},
        )
        assert r.status_code == 200
        body = r.json()
        assert body["result_page"] == [] and body["ads"] == []
        q = body["query"]
        assert len(q["segments"]) == 4
        assert q["segments"][q["intent_index"]] == INTENT
        assert q["pattern"] == "NITP"

    def test_compose_execute_serves_page_and_ads(self, client):
        sid = new_session(client)
        r = client.post(f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NI"})
        assert r.status_code == 200
        body = r.json()
        assert len(body["result_page"]) == 10
        assert len(body["ads"]) == 4
        assert {"id", "url", "title", "snippet", "categories", "score"} <= set(
            body["result_page"][0]
        )

    def test_segments_execution_has_no_intent_metadata(self, client):
        sid = new_session(client)
        r = client.post(
            f"/sessions/{sid}/query",
            json={"segments": ["cnn.com", INTENT, "world cup 2010"]},
        )
        assert r.status_code == 200
        assert set(r.json()["query"]) == {"segments"}

    def test_segments_and_intent_rejected_together(self, client):
        sid = new_session(client)
        r = client.post(
            f"/sessions/{sid}/query",
            json={"segments": ["a"], "intent": INTENT, "pattern": "NI"},
        )
        assert r.status_code == 400

    def test_empty_segments_rejected(self, client):
        sid = new_session(client)
        assert (
            client.post(f"/sessions/{sid}/query", json={"segments": []}).status_code == 400
        )
        assert (
            client.post(f"/sessions/{sid}/query", json={"segments": ["ok", " "]}).status_code
            == 400
        )

    def test_fixed_seed_compose_reproducible(self, client):
        sid = new_session(client)
        a = client.post(
            f"/sessions/{sid}/query",
            json={"intent": INTENT, "pattern": "NITP", "seed": 41, "preview": True},
        ).json()["query"]["segments"]
        b = client.post(
            f"/sessions/{sid}/query",
            json={"intent": INTENT, "pattern": "NITP", "seed": 41, "preview": True},
        ).json()["query"]["segments"]
        assert a == b

    def test_bad_pattern_rejected(self, client):
        sid = new_session(client)
        r = client.post(f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NN"})
        assert r.status_code == 400


class TestClicks:
    def test_three_clicks_total_three(self, client):
        sid = new_session(client)
        body = client.post(
            f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NITP"}
        ).json()
        targets = [
            (body["result_page"][0]["id"], "result"),
            (body["result_page"][3]["id"], "result"),
            (body["ads"][0]["id"], "ad"),
        ]
        total = None
        for target, kind in targets:
            r = client.post(f"/sessions/{sid}/click", json={"target": target, "kind": kind})
            assert r.status_code == 200
            total = r.json()["total"]
        assert total == 3
        profile = client.get(f"/sessions/{sid}/profile").json()
        assert profile["total"] == 3

    def test_click_unknown_doc_is_validation_error(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NI"})
        r = client.post(f"/sessions/{sid}/click", json={"target": "D9999", "kind": "result"})
        assert r.status_code == 400

    def test_click_unknown_kind(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NI"})
        r = client.post(f"/sessions/{sid}/click", json={"target": "x", "kind": "doc"})
        assert r.status_code == 400

    def test_click_before_any_query(self, client):
        sid = new_session(client)
        r = client.post(f"/sessions/{sid}/click", json={"target": "D0001", "kind": "result"})
        assert r.status_code == 400


class TestProfileAndLog:
    def test_profile_empty_before_activity(self, client):
        sid = new_session(client)
        body = client.get(f"/sessions/{sid}/profile").json()
        assert body == {"profile": {}, "total": 0, "exposure": None}

    def test_exposure_appears_after_composed_query(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NI"})
        body = client.get(f"/sessions/{sid}/profile").json()
        assert body["exposure"] is not None
        assert body["exposure"]["total_ads"] == 4
        assert 0.0 <= body["exposure"]["exposure"] <= 1.0

    def test_segments_only_session_has_no_exposure(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/query", json={"segments": ["coffee prices"]})
        body = client.get(f"/sessions/{sid}/profile").json()
        # ads were served but the server never learned an intent
        assert body["exposure"] is None

    def test_log_records_impressions_and_clicks(self, client):
        sid = new_session(client)
        body = client.post(
            f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NI"}
        ).json()
        client.post(
            f"/sessions/{sid}/click",
            json={"target": body["result_page"][0]["id"], "kind": "result"},
        )
        events = client.get(f"/sessions/{sid}/log").json()["events"]
        kinds = [e["type"] for e in events]
        assert kinds.count("ad_impression") == 4
        assert kinds.count("click") == 1
        stamps = [e["timestamp"] for e in events]
        assert stamps == sorted(stamps)


class TestReportEndpoint:
    def test_404_before_any_report(self, client):
        assert client.get("/report/latest").status_code == 404

    def test_served_after_emit(self, client):
        report = run_experiment(
            ExperimentConfig(seed=1, days=1, ads_per_day=2, classifiers=("knn",))
        )
        emit_report(report, client.report_dir)
        body = client.get("/report/latest").json()
        assert body["metadata"]["queries"] == 121


def test_shutdown_flushes_session_logs(tmp_path):
    report_dir = tmp_path / "reports"
    app = create_app(seed=6, report_dir=report_dir)
    with TestClient(app) as client:
        sid = client.post("/sessions").json()["session_id"]
        body = client.post(
            f"/sessions/{sid}/query", json={"intent": INTENT, "pattern": "NI"}
        ).json()
        client.post(
            f"/sessions/{sid}/click",
            json={"target": body["result_page"][0]["id"], "kind": "result"},
        )
    log_path = report_dir / "sessions" / f"{sid}.jsonl"
    assert log_path.is_file()
    records = [json.loads(line) for line in log_path.read_text().splitlines()]
    assert [r["type"] for r in records].count("click") == 1
