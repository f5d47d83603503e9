"""HTTP API integration tests against the fixture provider."""

from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from persona.model import load_profile
from persona.rerank import FixtureProvider
from persona.service import ServiceConfig, create_app, load_config_file, provider_from_spec


RESULTS = [
    {"url": "https://linux.example/journal", "title": "linux journal weekly",
     "snippet": "linux kernel articles and journal issues"},
    {"url": "https://news.example/1", "title": "morning news digest",
     "snippet": "headlines roundup"},
    {"url": "https://cooking.example/2", "title": "pasta recipes",
     "snippet": "cooking ideas"},
]

HISTORY = "\n".join(
    json.dumps(row)
    for row in [
        {"url": "https://linux.example/home", "title": "linux kernel development",
         "visit_time": 1_700_000_000, "duration": 120, "transition": "typed"},
        {"url": "https://www.google.com/search?q=linux+journal", "title": "linux journal - Google Search",
         "visit_time": 1_700_000_100, "duration": 15, "transition": "clicked"},
        {"url": "https://linux.example/kernel", "title": "linux kernel changelog",
         "visit_time": 1_700_000_200, "duration": 90, "transition": "clicked"},
    ]
)


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(profile_path=str(tmp_path / "profile.json"))
    provider = FixtureProvider({"query": "linux", "results": RESULTS})
    app = create_app(config, provider=provider)
    with TestClient(app) as c:
        yield c


class TestSummary:
    def test_empty_profile_summary(self, client):
        doc = client.get("/api/profile/summary").json()
        assert doc["counts"]["visits"] == 0
        assert doc["wob_bands"] == {"present": 0, "prev": 0, "old": 0}
        assert doc["top_keywords"] == []
        assert doc["top_topics"] == []


class TestIngest:
    def test_ingest_report(self, client):
        resp = client.post("/api/ingest/history", content=HISTORY + "\nnot json\n")
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["accepted"] == 3
        assert doc["rejected"] == 1
        assert doc["rejects"][0]["line"] == 4

    def test_ingest_updates_summary(self, client):
        client.post("/api/ingest/history", content=HISTORY)
        doc = client.get("/api/profile/summary").json()
        assert doc["wob_bands"]["present"] == 3
        assert doc["counts"]["search_patterns"] == 1
        assert any(k["term"] == "linux" for k in doc["top_keywords"])

    def test_mutations_durable_on_disk(self, client, tmp_path):
        client.post("/api/ingest/history", content=HISTORY)
        stored = load_profile(tmp_path / "profile.json")
        assert len(stored.visits_present) == 3


class TestSearch:
    def test_empty_profile_returns_provider_order(self, client):
        doc = client.post("/api/search", json={"query": "linux"}).json()
        assert [r["url"] for r in doc["results"]] == [r["url"] for r in RESULTS]
        assert [r["original_rank"] for r in doc["results"]] == [1, 2, 3]
        assert set(doc["results"][0]["signals"]) == {"u_g", "k_w", "t_v", "o_v", "w_r", "s_g"}

    def test_missing_query_400(self, client):
        assert client.post("/api/search", json={}).status_code == 400

    def test_bad_n_400(self, client):
        assert client.post("/api/search", json={"query": "x", "n": 0}).status_code == 400

    def test_click_then_search_grade_non_decreasing(self, client):
        client.post("/api/ingest/history", content=HISTORY)
        first = client.post("/api/search", json={"query": "linux"}).json()
        target = first["results"][0]["url"]
        before = next(r["grade"] for r in first["results"] if r["url"] == target)
        resp = client.post(
            "/api/feedback/click",
            json={"query": "linux", "url": target, "dwell_seconds": 30},
        )
        assert resp.status_code == 204
        second = client.post("/api/search", json={"query": "linux"}).json()
        after = next(r["grade"] for r in second["results"] if r["url"] == target)
        assert after >= before


class TestFeedback:
    def test_unknown_url_404(self, client):
        client.post("/api/search", json={"query": "linux"})
        resp = client.post(
            "/api/feedback/click",
            json={"query": "linux", "url": "https://nope.example/", "dwell_seconds": 1},
        )
        assert resp.status_code == 404

    def test_negative_dwell_400(self, client):
        resp = client.post(
            "/api/feedback/click",
            json={"query": "linux", "url": RESULTS[0]["url"], "dwell_seconds": -1},
        )
        assert resp.status_code == 400


class TestCuration:
    def test_delete_unknown_keyword_404(self, client):
        assert client.delete("/api/profile/keyword/nope").status_code == 404

    def test_delete_keyword(self, client):
        client.post("/api/ingest/history", content=HISTORY)
        assert client.delete("/api/profile/keyword/linux").status_code == 204
        doc = client.get("/api/profile/summary").json()
        assert all(k["term"] != "linux" for k in doc["top_keywords"])

    def test_put_keyword_override(self, client):
        resp = client.put("/api/profile/keyword/rust", json={"frequency": 50})
        assert resp.status_code == 200
        assert resp.json()["frequency"] == 50
        doc = client.get("/api/profile/summary").json()
        assert {"term": "rust", "frequency": 50, "percentile": 100.0} in [
            {k: v for k, v in row.items()} for row in doc["top_keywords"]
        ]

    def test_put_keyword_bad_frequency_400(self, client):
        assert client.put("/api/profile/keyword/rust", json={"frequency": 0}).status_code == 400

    def test_delete_unknown_topic_404(self, client):
        assert client.delete("/api/profile/topic/nope").status_code == 404

    def test_delete_topic(self, client):
        client.post("/api/ingest/history", content=HISTORY)
        doc = client.get("/api/profile/summary").json()
        name = doc["top_topics"][0]["name"]
        assert client.delete(f"/api/profile/topic/{name}").status_code == 204
        doc = client.get("/api/profile/summary").json()
        assert all(t["name"] != name for t in doc["top_topics"])


class TestRotation:
    def test_force_rotate_moves_bands(self, client):
        client.post("/api/ingest/history", content=HISTORY)
        doc = client.post("/api/profile/rotate").json()
        assert doc["wob_bands"] == {"present": 0, "prev": 3, "old": 0}

    def test_event_limit_triggers_rotation_on_ingest(self, tmp_path):
        from persona.model import WobConfig

        config = ServiceConfig(
            profile_path=str(tmp_path / "p.json"),
            wob_config=WobConfig(event_limit=2),
        )
        provider = FixtureProvider({"query": "linux", "results": RESULTS})
        with TestClient(create_app(config, provider=provider)) as client:
            client.post("/api/ingest/history", content=HISTORY)
            doc = client.get("/api/profile/summary").json()
            assert doc["wob_bands"]["present"] == 0
            assert doc["wob_bands"]["prev"] == 3


class TestSingleWriter:
    def test_second_writer_rejected_with_409(self, client):
        app = client.app
        store = app.state.store
        entered = threading.Event()
        release = threading.Event()

        def slow(profile):
            entered.set()
            release.wait(timeout=5)
            return profile

        t = threading.Thread(target=lambda: store.mutate(slow))
        t.start()
        try:
            assert entered.wait(timeout=5)
            resp = client.post("/api/profile/rotate")
            assert resp.status_code == 409
        finally:
            release.set()
            t.join(timeout=5)
        # writer released: mutations work again
        assert client.post("/api/profile/rotate").status_code == 200


class TestConfig:
    def test_provider_from_spec_fixture(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"query": "q", "results": []}))
        provider = provider_from_spec(f"fixture:{path}")
        assert provider.search("q", 5) == []

    def test_provider_from_spec_unknown(self):
        with pytest.raises(ValueError):
            provider_from_spec("carrier-pigeon:coop")

    def test_config_file_parsing(self, tmp_path):
        path = tmp_path / "persona.conf"
        path.write_text("# comment\nlisten = 0.0.0.0:9000\nprovider=fixture:x.json\n")
        assert load_config_file(path) == {
            "listen": "0.0.0.0:9000",
            "provider": "fixture:x.json",
        }

    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("PERSONA_LISTEN", "0.0.0.0:1234")
        monkeypatch.setenv("PERSONA_PROFILE", "/tmp/x.json")
        monkeypatch.setenv("PERSONA_PROVIDER", "fixture:y.json")
        cfg = ServiceConfig.from_env()
        assert cfg.listen == "0.0.0.0:1234"
        assert cfg.profile_path == "/tmp/x.json"
        assert cfg.provider_spec == "fixture:y.json"
