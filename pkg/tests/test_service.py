"""HTTP editing service: sessions, previews, edits, undo, explanations."""

from __future__ import annotations

import numpy as np
import pytest
from fastapi.testclient import TestClient

import glassboost as gb
from glassboost.service import create_app


@pytest.fixture(scope="module")
def client(toy_dataset, toy_model):
    app = create_app(toy_model, toy_dataset)
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def session_id(client):
    resp = client.post("/sessions", json={})
    assert resp.status_code == 200
    return resp.json()["session_id"]


DEFAULT_EDITS = {
    "univariate": [
        {"feature": "GWD", "family": "sigmoid", "direction": "decreasing",
         "excluded": [[0.0, 0.7], [1.0, 1.5]]},
        {"feature": "PGA", "family": "sigmoid", "direction": "increasing",
         "excluded": [[0.51, 99.0]]},
        {"feature": "L", "family": "step", "breakpoints": [0.1, 0.49],
         "levels": [1.61, 0.5, -0.36]},
    ],
    "interactions": [
        {"pair": ["GWD", "PGA"], "metric": "range", "epsilon": 0.4},
        {"pair": ["GWD", "L"], "metric": "range", "epsilon": 0.4},
        {"pair": ["L", "PGA"], "metric": "range", "epsilon": 0.4},
    ],
}


class TestSessions:
    def test_create_session_reports_model(self, client):
        resp = client.post("/sessions", json={})
        body = resp.json()
        assert body["n_terms"] == 15
        assert body["feature_names"] == ["GWD", "PGA", "L", "slope", "elevation"]

    def test_terms_inventory(self, client, session_id):
        resp = client.get(f"/sessions/{session_id}/terms")
        body = resp.json()
        assert len(body["univariate"]) == 5
        assert len(body["interactions"]) == 10
        assert not any(t["edited"] for t in body["univariate"])

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/terms").status_code == 404


class TestFitPreview:
    def test_gwd_exclusions_give_decreasing_sigmoid(self, client, session_id):
        resp = client.post(f"/sessions/{session_id}/fit-preview", json={
            "feature": "GWD", "family": "sigmoid", "direction": "decreasing",
            "excluded": [[0.0, 0.7], [1.0, 1.5]],
        })
        assert resp.status_code == 200
        body = resp.json()
        params = body["replacement"]
        assert params["a"] * params["c"] < 0
        fitted = body["fitted"]
        assert all(b <= a + 1e-9 for a, b in zip(fitted, fitted[1:]))
        assert len(body["sampled"]) == 100
        assert sum(body["selected"]) < 100

    def test_excluding_almost_everything_is_422(self, client, session_id):
        resp = client.post(f"/sessions/{session_id}/fit-preview", json={
            "feature": "GWD", "family": "sigmoid",
            "excluded": [[0.0, 98.0]],
        })
        assert resp.status_code == 422

    def test_preview_is_pure(self, client, session_id):
        req = {"feature": "PGA", "family": "sigmoid", "direction": "increasing",
               "excluded": [[0.51, 99.0]]}
        a = client.post(f"/sessions/{session_id}/fit-preview", json=req).json()
        b = client.post(f"/sessions/{session_id}/fit-preview", json=req).json()
        assert a == b

    def test_step_preview_echoes_spec(self, client, session_id):
        resp = client.post(f"/sessions/{session_id}/fit-preview", json={
            "feature": "L", "family": "step",
            "breakpoints": [0.1, 0.49], "levels": [1.61, 0.5, -0.36],
        })
        assert resp.status_code == 200
        assert resp.json()["replacement"]["breakpoints"] == [0.1, 0.49]


class TestReplacementPreview:
    def test_requires_edited_univariates(self, client, session_id):
        resp = client.post(f"/sessions/{session_id}/replacement-preview", json={
            "pair": ["GWD", "PGA"], "metric": "range", "epsilon": 0.4,
        })
        assert resp.status_code == 422

    def test_mask_nesting_over_epsilon(self, client, session_id):
        resp = client.post(f"/sessions/{session_id}/edits", json={
            "univariate": DEFAULT_EDITS["univariate"], "interactions": [],
        })
        assert resp.status_code == 200
        fractions = []
        masks = []
        for eps in (0.1, 0.4, 0.8, 1.5):
            resp = client.post(f"/sessions/{session_id}/replacement-preview", json={
                "pair": ["GWD", "PGA"], "metric": "range", "epsilon": eps,
            })
            body = resp.json()
            fractions.append(body["replaced_fraction"])
            masks.append(np.array(body["mask"], dtype=bool))
        assert fractions == sorted(fractions, reverse=True)
        for tighter, looser in zip(masks[1:], masks[:-1]):
            assert np.all(looser | ~tighter)

    def test_preview_does_not_mutate(self, client, session_id):
        before = client.get(f"/sessions/{session_id}/terms").json()["model_hash"]
        client.post(f"/sessions/{session_id}/edits", json={
            "univariate": DEFAULT_EDITS["univariate"], "interactions": []})
        h1 = client.get(f"/sessions/{session_id}/terms").json()["model_hash"]
        client.post(f"/sessions/{session_id}/replacement-preview", json={
            "pair": ["GWD", "PGA"], "metric": "range", "epsilon": 0.4})
        h2 = client.get(f"/sessions/{session_id}/terms").json()["model_hash"]
        assert h1 == h2
        assert h1 != before


class TestApplyAndUndo:
    def test_apply_returns_eval_deltas(self, client, session_id):
        resp = client.post(f"/sessions/{session_id}/edits", json=DEFAULT_EDITS)
        assert resp.status_code == 200
        body = resp.json()
        assert body["provenance"] == "domain_informed"
        assert len(body["reports"]) == 3
        assert "test" in body["eval"]["delta"]
        assert body["eval"]["base"]["test"]["accuracy"] != body["eval"]["working"]["test"]["accuracy"]

    def test_undo_restores_base_hash(self, client, session_id):
        base_hash = client.get(f"/sessions/{session_id}/terms").json()["model_hash"]
        client.post(f"/sessions/{session_id}/edits", json=DEFAULT_EDITS)
        resp = client.post(f"/sessions/{session_id}/undo")
        assert resp.status_code == 200
        assert resp.json()["model_hash"] == base_hash

    def test_undo_empty_stack_conflict(self, client, session_id):
        assert client.post(f"/sessions/{session_id}/undo").status_code == 409

    def test_concurrent_edit_conflict(self, client, toy_model, toy_dataset, session_id):
        app = client.app
        session = app.state.sessions[session_id]
        assert session.lock.acquire(blocking=False)
        try:
            resp = client.post(f"/sessions/{session_id}/edits", json=DEFAULT_EDITS)
            assert resp.status_code == 409
        finally:
            session.lock.release()

    def test_edits_isolated_between_sessions(self, client):
        s1 = client.post("/sessions", json={}).json()["session_id"]
        s2 = client.post("/sessions", json={}).json()["session_id"]
        client.post(f"/sessions/{s1}/edits", json=DEFAULT_EDITS)
        h1 = client.get(f"/sessions/{s1}/terms").json()["model_hash"]
        h2 = client.get(f"/sessions/{s2}/terms").json()["model_hash"]
        assert h1 != h2


class TestExplanations:
    def test_site_explanation_both_models(self, client, session_id, toy_dataset):
        site = int(toy_dataset.site_ids[3])
        client.post(f"/sessions/{session_id}/edits", json=DEFAULT_EDITS)
        base = client.get(f"/sessions/{session_id}/explain/{site}",
                          params={"which": "base"}).json()
        working = client.get(f"/sessions/{session_id}/explain/{site}",
                             params={"which": "working"}).json()
        assert base["site_id"] == site
        assert base["contributions"] != working["contributions"]

    def test_base_explanation_stable_across_edits(self, client, session_id, toy_dataset):
        site = int(toy_dataset.site_ids[5])
        before = client.get(f"/sessions/{session_id}/explain/{site}",
                            params={"which": "base"}).json()
        client.post(f"/sessions/{session_id}/edits", json=DEFAULT_EDITS)
        after = client.get(f"/sessions/{session_id}/explain/{site}",
                           params={"which": "base"}).json()
        assert before == after

    def test_unknown_site_404(self, client, session_id):
        assert client.get(f"/sessions/{session_id}/explain/999999999").status_code == 404
