from __future__ import annotations

import threading

import pytest
from fastapi.testclient import TestClient

from haggle.service import ServiceConfig, create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(ServiceConfig(data_dir=str(tmp_path)))
    with TestClient(app) as c:
        yield c


VALID_PRODUCT = {
    "title": "Espresso machine",
    "description": "Works perfectly",
    "category": "kitchen",
    "list_price": 250,
    "bottom_price": 200,
}


def create_session(client, **overrides):
    payload = {"product": dict(VALID_PRODUCT), "rng_seed": 5}
    payload.update(overrides)
    response = client.post("/api/v1/sessions", json=payload)
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


class TestCreateSession:
    def test_valid_product_creates(self, client):
        session_id = create_session(client)
        assert session_id

    def test_duplicate_creates_get_distinct_ids(self, client):
        assert create_session(client) != create_session(client)

    def test_bottom_above_list_is_400(self, client):
        bad = dict(VALID_PRODUCT, bottom_price=300)
        response = client.post("/api/v1/sessions", json={"product": bad})
        assert response.status_code == 400
        body = response.json()
        assert set(body) == {"code", "message", "detail"}
        assert body["code"] == "invalid_product"

    def test_nonpositive_price_is_400(self, client):
        bad = dict(VALID_PRODUCT, list_price=0, bottom_price=0)
        response = client.post("/api/v1/sessions", json={"product": bad})
        assert response.status_code == 400

    def test_malformed_body_is_422_with_envelope(self, client):
        response = client.post("/api/v1/sessions", json={"product": {"title": "x"}})
        assert response.status_code == 422
        assert response.json()["code"] == "malformed_request"


class TestMessages:
    def test_offer_message_returns_reply_and_trace(self, client):
        session_id = create_session(client)
        response = client.post(
            f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $200 OK?"}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["reply"]
        trace = body["decision_trace"]
        assert trace["buyer_price_seen"] == "200"
        assert trace["action"] in {
            "DEAL", "PROPOSE", "COUNTER", "COUNTER-NOPRICE", "REJECT", "HELLO", "ANS",
        }
        assert trace["rationale"]

    def test_greeting_routes_to_hello_or_ans(self, client):
        session_id = create_session(client)
        response = client.post(
            f"/api/v1/sessions/{session_id}/messages",
            json={"text": "hi, still available?"},
        )
        assert response.json()["decision_trace"]["action"] in ("HELLO", "ANS")

    def test_unknown_session_404(self, client):
        response = client.post("/api/v1/sessions/nope/messages", json={"text": "hi"})
        assert response.status_code == 404

    def test_message_on_dealt_session_409(self, client):
        session_id = create_session(client)
        response = client.post(
            f"/api/v1/sessions/{session_id}/messages", json={"text": "240, final"}
        )
        # threshold 0.95 * 250 = 237.5, so the agent deals
        assert response.json()["status"] == "deal"
        response = client.post(
            f"/api/v1/sessions/{session_id}/messages", json={"text": "hello?"}
        )
        assert response.status_code == 409
        assert response.json()["code"] == "terminal_session"

    def test_buyer_acceptance_closes_without_agent_reply(self, client):
        session_id = create_session(client)
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $210 OK?"})
        response = client.post(
            f"/api/v1/sessions/{session_id}/messages", json={"text": "deal, I'll take it"}
        )
        body = response.json()
        assert body["status"] == "deal"
        assert body["reply"] is None
        assert body["deal_price"] is not None

    def test_concurrent_posts_processed_in_order(self, client):
        session_id = create_session(client)
        results = {}
        barrier = threading.Barrier(2)

        def post(name, text):
            barrier.wait()
            results[name] = client.post(
                f"/api/v1/sessions/{session_id}/messages", json={"text": text}
            )

        threads = [
            threading.Thread(target=post, args=("a", "Is $205 OK?")),
            threading.Thread(target=post, args=("b", "Is $208 OK?")),
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        statuses = sorted(r.status_code for r in results.values())
        assert statuses in ([200, 200], [200, 409])
        snapshot = client.get(f"/api/v1/sessions/{session_id}").json()
        speakers = [u["speaker"] for u in snapshot["utterances"]]
        assert speakers == ["buyer", "seller_agent"] * (len(speakers) // 2)


class TestTraceCompleteness:
    def test_every_reply_trace_satisfies_decision_invariants(self, client):
        session_id = create_session(client)
        texts = ["hi there", "Is $205 OK?", "what about 208?", "ok then 210?"]
        for text in texts:
            response = client.post(
                f"/api/v1/sessions/{session_id}/messages", json={"text": text}
            )
            if response.status_code != 200:
                break
            trace = response.json()["decision_trace"]
            if trace is None:
                continue
            if trace["action"] in ("PROPOSE", "COUNTER"):
                assert trace["seller_price"] is not None
            if trace["action"] in ("COUNTER-NOPRICE", "HELLO", "ANS"):
                assert trace["seller_price"] is None
            if trace["action"] == "REJECT":
                assert trace["seller_price"] == "200"
            assert trace["skill"] is not None


class TestSnapshot:
    def test_snapshot_after_two_exchanges(self, client):
        session_id = create_session(client)
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "hi there"})
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $205 OK?"})
        snapshot = client.get(f"/api/v1/sessions/{session_id}").json()
        assert len(snapshot["utterances"]) == 4
        assert [u["turn"] for u in snapshot["utterances"]] == [0, 1, 2, 3]

    def test_snapshot_validates_clean(self, client):
        from haggle.models import session_from_dict
        from haggle.session import validate

        session_id = create_session(client)
        client.post(f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $205 OK?"})
        snapshot = client.get(f"/api/v1/sessions/{session_id}").json()
        assert validate(session_from_dict(snapshot)) == []

    def test_unknown_session_404(self, client):
        assert client.get("/api/v1/sessions/nope").status_code == 404


class TestPersistence:
    def test_sessions_survive_restart(self, tmp_path):
        config = ServiceConfig(data_dir=str(tmp_path))
        with TestClient(create_app(config)) as first:
            response = first.post(
                "/api/v1/sessions", json={"product": VALID_PRODUCT, "rng_seed": 5}
            )
            session_id = response.json()["session_id"]
            first.post(
                f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $205 OK?"}
            )
            before = first.get(f"/api/v1/sessions/{session_id}").json()

        with TestClient(create_app(ServiceConfig(data_dir=str(tmp_path)))) as second:
            after = second.get(f"/api/v1/sessions/{session_id}").json()
            assert after == before
            # and the session still accepts messages
            response = second.post(
                f"/api/v1/sessions/{session_id}/messages", json={"text": "ok, 215?"}
            )
            assert response.status_code == 200


class TestHealthAndFallbackSafety:
    def test_health(self, client):
        assert client.get("/api/v1/health").json() == {"status": "ok"}

    def test_poisoned_backend_still_replies_200(self, tmp_path, monkeypatch):
        # a 502 would require both the backend and the template fallback to
        # fail; the template path is total, so replies always materialize
        from haggle import service as service_module
        from haggle.backend import FailingBackend

        monkeypatch.setattr(service_module, "backend_from_env", lambda: FailingBackend())
        app = create_app(ServiceConfig(data_dir=str(tmp_path)))
        with TestClient(app) as client:
            response = client.post(
                "/api/v1/sessions", json={"product": VALID_PRODUCT, "rng_seed": 5}
            )
            session_id = response.json()["session_id"]
            response = client.post(
                f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $205 OK?"}
            )
            assert response.status_code == 200
            assert response.json()["reply"]


class TestSessionConfigOverrides:
    def test_planner_override_applies(self, client):
        session_id = create_session(
            client, config={"planner": {"use_skills": False, "use_bidirectional": False}}
        )
        response = client.post(
            f"/api/v1/sessions/{session_id}/messages", json={"text": "Is $205 OK?"}
        )
        trace = response.json()["decision_trace"]
        assert trace["skill"] in (None, "CHAT")
        assert trace["anticipated_buyer_moves"] == []

    def test_invalid_override_is_400(self, client):
        response = client.post(
            "/api/v1/sessions",
            json={
                "product": VALID_PRODUCT,
                "config": {"planner": {"accept_threshold_ratio": 7}},
            },
        )
        assert response.status_code == 400
