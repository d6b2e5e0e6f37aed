"""Tests for the HTTP session service."""

import hashlib
import json

import pytest
from fastapi.testclient import TestClient

import rigabench.service as service
from rigabench.baselines import SimulatedDm, gen_hidden
from rigabench.core import (
    Answer,
    GenerationRecord,
    QueryRecord,
    RigaConfig,
    RunTrace,
    riga_run,
)
from rigabench.prefs import (
    CostVector,
    Family,
    Monotone,
    Orientation,
    OwaWeights,
    PreferenceModel,
)
from rigabench.problems import Solution, gen_knapsack
from rigabench.regret import (
    InconsistentPreferenceError,
    ParameterPolytope,
    PreferenceStatement,
)
from rigabench.service import build_app

Y_A = [49.0, 52.0, 60.0]
Y_B = [39.0, 50.0, 66.0]
Y_C = [56.0, 57.0, 58.0]


def golden_hidden() -> PreferenceModel:
    return PreferenceModel(
        Family.OWA,
        OwaWeights((0.1, 0.3, 0.6), Monotone.NON_DECREASING),
        Orientation.MINIMIZE,
    )


def golden_request() -> dict:
    return {
        "config": {
            "family": "OWA",
            "generations": 2,
            "population_size": 5,
            "survivors": 2,
            "delta": 0.0,
            "seed": 7,
        },
        "instance": {
            "problem": "catalog",
            "options": [Y_A, Y_B, Y_C],
            "orientation": "min",
        },
    }


@pytest.fixture
def client():
    return TestClient(build_app())


def drive(client: TestClient, session_id: str, hidden: PreferenceModel) -> int:
    """Answer queries as the hidden model would until the session leaves
    AwaitingAnswer; returns the number of answers posted."""
    dm = SimulatedDm(hidden)
    answers = 0
    while True:
        state = client.get(f"/sessions/{session_id}").json()["state"]
        if state != "AwaitingAnswer":
            return answers
        query = client.get(f"/sessions/{session_id}/query").json()
        a = CostVector(tuple(query["a"]))
        b = CostVector(tuple(query["b"]))
        choice = "A" if dm.answer(a, b) is Answer.PREFERS_A else "B"
        posted = client.post(
            f"/sessions/{session_id}/answer",
            json={"choice": choice, "query_index": query["query_index"]},
        )
        assert posted.status_code == 200, posted.text
        answers += 1
        assert answers <= 500, "session did not converge"


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


# ------------------------------------------------------------- create + view


def test_create_golden_session_awaits_first_query(client):
    response = client.post("/sessions", json=golden_request())
    assert response.status_code == 201, response.text
    body = response.json()
    assert body["state"] == "AwaitingAnswer"
    assert body["problem"] == "catalog"
    assert (body["n"], body["size"]) == (3, 3)
    assert (body["family"], body["orientation"]) == ("OWA", "min")
    assert body["config"]["generations"] == 2
    progress = body["progress"]
    assert progress == {
        "generation": 1,
        "total_generations": 2,
        "queries_asked": 0,
        "normalized_mmr": 1.0,
    }
    assert set(body) == {
        "id", "state", "problem", "n", "size", "family", "orientation",
        "config", "progress", "warnings",
    }


def test_query_read_is_idempotent(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    first = client.get(f"/sessions/{session_id}/query")
    second = client.get(f"/sessions/{session_id}/query")
    assert first.status_code == 200
    assert first.content == second.content
    query = first.json()
    assert query["query_index"] == 0
    assert query["a"] == Y_A  # x* of the golden population


def test_query_carries_per_objective_context(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    query = client.get(f"/sessions/{session_id}/query").json()
    objectives = query["objectives"]
    assert [o["label"] for o in objectives] == [
        "objective 1", "objective 2", "objective 3",
    ]
    for k, objective in enumerate(objectives):
        assert objective["min"] <= min(query["a"][k], query["b"][k])
        assert objective["max"] >= max(query["a"][k], query["b"][k])
    # The golden pool spans these exact ranges per objective.
    assert [o["min"] for o in objectives] == [39.0, 50.0, 58.0]
    assert [o["max"] for o in objectives] == [56.0, 57.0, 66.0]


def test_golden_session_finishes_after_two_answers(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    assert drive(client, session_id, golden_hidden()) == 2
    session = client.get(f"/sessions/{session_id}").json()
    assert session["state"] == "Finished"
    assert session["progress"]["queries_asked"] == 2
    recommendation = client.get(f"/sessions/{session_id}/recommendation")
    assert recommendation.status_code == 200
    body = recommendation.json()
    assert body["solution"]["cost"] == Y_A
    assert body["trace"]["totals"]["queries"] == 2
    assert all(q["answer"] == "A" for q in body["trace"]["queries"])
    pointer = client.get(f"/sessions/{session_id}/query")
    assert pointer.status_code == 200
    assert pointer.json() == {
        "state": "Finished",
        "recommendation": f"/sessions/{session_id}/recommendation",
    }


def test_delta_one_finishes_immediately(client):
    request = {
        "config": {"family": "WS", "delta": 1.0, "seed": 3},
        "instance": {"problem": "knapsack", "size": 8, "n": 3, "seed": 3},
    }
    body = client.post("/sessions", json=request).json()
    assert body["state"] == "Finished"
    assert body["progress"]["queries_asked"] == 0
    recommendation = client.get(f"/sessions/{body['id']}/recommendation")
    assert recommendation.status_code == 200
    assert recommendation.json()["trace"]["totals"]["queries"] == 0


# ------------------------------------------------------------------- errors


def test_unknown_session_is_404(client):
    for path in ("", "/query", "/answer", "/recommendation"):
        if path == "/answer":
            response = client.post(f"/sessions/nope{path}", json={"choice": "A"})
        else:
            response = client.get(f"/sessions/nope{path}")
        assert response.status_code == 404
        assert response.json()["code"] == "not_found"


def test_create_rejects_mismatched_catalog(client):
    request = golden_request()
    request["instance"]["options"] = [[1.0, 2.0], [3.0]]
    response = client.post("/sessions", json=request)
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "invalid_instance"
    assert body["field"] == "instance"


def test_create_rejects_invalid_body_with_field_diagnostics(client):
    request = golden_request()
    del request["config"]["family"]
    response = client.post("/sessions", json=request)
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "invalid_request"
    assert "family" in body["field"]


def test_create_rejects_inconsistent_run_parameters(client):
    request = golden_request()
    request["config"]["survivors"] = 9  # not below the population size
    response = client.post("/sessions", json=request)
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "invalid_config" and body["field"] == "config"


def test_stale_and_duplicate_answers_conflict(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    first = client.post(
        f"/sessions/{session_id}/answer", json={"choice": "A", "query_index": 0}
    )
    assert first.status_code == 200
    duplicate = client.post(
        f"/sessions/{session_id}/answer", json={"choice": "A", "query_index": 0}
    )
    assert duplicate.status_code == 409
    body = duplicate.json()
    assert body["code"] == "stale_query" and body["field"] == "query_index"
    # The duplicate was not applied: the pending query still has index 1.
    assert client.get(f"/sessions/{session_id}/query").json()["query_index"] == 1


def test_answer_without_index_is_accepted(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    response = client.post(f"/sessions/{session_id}/answer", json={"choice": "A"})
    assert response.status_code == 200


def test_answering_a_finished_session_conflicts(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    drive(client, session_id, golden_hidden())
    response = client.post(
        f"/sessions/{session_id}/answer", json={"choice": "B"}
    )
    assert response.status_code == 409
    assert response.json()["code"] == "conflict"


def test_recommendation_before_finished_conflicts(client):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    response = client.get(f"/sessions/{session_id}/recommendation")
    assert response.status_code == 409
    assert response.json()["code"] == "not_finished"


# ------------------------------------------------------- replay equivalence


def test_http_sessions_match_direct_runs():
    client = TestClient(build_app())
    for seed in range(5):
        instance = gen_knapsack(10, 3, seed=700 + seed)
        hidden = gen_hidden(Family.WS, 3, Orientation.MAXIMIZE, seed=70 + seed)
        request = {
            "config": {"family": "WS", "seed": seed},
            "instance": {"problem": "knapsack", "size": 10, "n": 3, "seed": 700 + seed},
        }
        session_id = client.post("/sessions", json=request).json()["id"]
        answered = drive(client, session_id, hidden)
        over_http = client.get(f"/sessions/{session_id}/recommendation").json()
        config = RigaConfig.default_for(instance, Family.WS, seed=seed)
        solution, trace = riga_run(instance, config, SimulatedDm(hidden))
        assert over_http["solution"]["cost"] == list(solution.cost.values)
        assert over_http["solution"]["encoding"] == list(solution.encoding)
        assert answered == trace.total_queries
        served = over_http["trace"]
        served["totals"]["wall_time_s"] = 0.0
        digest = hashlib.sha256(
            json.dumps(served, sort_keys=True).encode()
        ).hexdigest()
        assert digest == trace.fingerprint()


# ---------------------------------------------------------------- lifecycle


def test_persistence_rebuilds_sessions_by_replay(tmp_path):
    state_dir = tmp_path / "sessions"
    client = TestClient(build_app(state_dir))
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    client.post(f"/sessions/{session_id}/answer", json={"choice": "A", "query_index": 0})
    pending_before = client.get(f"/sessions/{session_id}/query").json()

    reborn = TestClient(build_app(state_dir))
    session = reborn.get(f"/sessions/{session_id}").json()
    assert session["state"] == "AwaitingAnswer"
    assert session["progress"]["queries_asked"] == 1
    assert reborn.get(f"/sessions/{session_id}/query").json() == pending_before

    assert drive(reborn, session_id, golden_hidden()) == 1
    recommendation = reborn.get(f"/sessions/{session_id}/recommendation").json()
    assert recommendation["solution"]["cost"] == Y_A

    # A finished session survives another restart as Finished.
    third = TestClient(build_app(state_dir))
    assert third.get(f"/sessions/{session_id}").json()["state"] == "Finished"


def test_computing_state_is_set_during_transitions(client, monkeypatch):
    session_id = client.post("/sessions", json=golden_request()).json()["id"]
    store = client.app.state.store
    session = store.get(session_id)
    observed = []
    original = service.compute_snapshot

    def spy(instance, config, answers):
        observed.append(session.snapshot.state)
        return original(instance, config, answers)

    monkeypatch.setattr(service, "compute_snapshot", spy)
    client.post(f"/sessions/{session_id}/answer", json={"choice": "A"})
    assert observed == [service.SessionState.COMPUTING]


def test_failed_sessions_surface_the_inconsistency_report(client, monkeypatch):
    def broken_run(instance, config, dm):
        trace = RunTrace("riga", config.family, config.orientation)
        a, b = CostVector((1.0, 2.0, 3.0)), CostVector((3.0, 2.0, 1.0))
        trace.queries.append(QueryRecord(a, b, Answer.PREFERS_A, 1, 0, accepted=False))
        trace.warnings.append("inconsistent answer rejected; elicitation stopped early")
        trace.generations.append(
            GenerationRecord(1, (a, b), 2.0, 2.0, 1, a)
        )
        return Solution((0,), a), trace

    monkeypatch.setattr(service, "riga_run", broken_run)
    body = client.post("/sessions", json=golden_request()).json()
    assert body["state"] == "Failed"
    assert any("inconsistent" in w for w in body["warnings"])
    session_id = body["id"]
    assert client.get(f"/sessions/{session_id}/query").status_code == 409
    recommendation = client.get(f"/sessions/{session_id}/recommendation")
    assert recommendation.status_code == 409
    assert recommendation.json()["code"] == "not_finished"


def test_preference_cycle_is_detected_as_inconsistent():
    # Three pairwise statements whose cuts cannot hold at once: the first
    # two pin w1 >= 2/3, the third demands w1 <= 1/2.
    v1, v2, v3 = CostVector((0.0, 3.0)), CostVector((1.0, 1.0)), CostVector((3.0, 0.0))
    polytope = ParameterPolytope.base_for(Family.WS, 2, Orientation.MINIMIZE)
    polytope = polytope.with_statement(PreferenceStatement(v1, v2))
    polytope = polytope.with_statement(PreferenceStatement(v2, v3))
    with pytest.raises(InconsistentPreferenceError):
        polytope.with_statement(PreferenceStatement(v3, v1))
