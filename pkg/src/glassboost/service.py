"""Local HTTP facade for interactive model editing sessions.

Each session owns a base model and a working model. Previews (curve refits,
replacement masks) are side-effect free; applying edits is serialized per
session with an undo stack. Bound to loopback by default; this is a local
single-analyst tool.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .data import Dataset
from .editor import (
    EditSpecBundle,
    apply_domain_edits,
    fit_sigmoid,
    parse_edit_spec,
    replacement_from_dict,
    sample_curve,
    select_trusted,
    synthesize_interaction,
    rescale_to_range,
    selective_replace,
    ReplacementPolicy,
    StepFunctionSpec,
)
from .explain import evaluate, explain_site
from .model import EbmModel, load_model, model_hash

UNDO_DEPTH = 32


def _clean(value):
    """Make payloads strictly JSON-safe: NaN/inf become None."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


@dataclass
class Session:
    session_id: str
    base: EbmModel
    working: EbmModel
    undo_stack: list[EbmModel] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    eval_cache: dict = field(default_factory=dict)


class FitPreviewRequest(BaseModel):
    feature: str
    family: str = "sigmoid"
    direction: str = "free"
    excluded: list[tuple[float, float]] = []
    breakpoints: list[float] = []
    levels: list[float] = []
    n_samples: int = 100


class ReplacementPreviewRequest(BaseModel):
    pair: tuple[str, str]
    metric: str = "range"
    epsilon: float = 0.40


class ApplyEditsRequest(BaseModel):
    univariate: list[dict] = []
    interactions: list[dict] = []


class CreateSessionRequest(BaseModel):
    model_path: str | None = None


def _term_payload(model: EbmModel) -> dict:
    edited = {e.get("feature") for e in model.edit_log if e.get("kind") == "univariate"}
    edited_pairs = {tuple(e.get("pair", ())) for e in model.edit_log
                    if e.get("kind") == "interaction"}
    univariate = [
        {
            "feature": t.feature,
            "cuts": t.edges.cuts.tolist(),
            "scores": t.scores.tolist(),
            "train_weight": t.train_weight.tolist(),
            "train_range": list(t.train_range),
            "edited": t.feature in edited,
        }
        for t in model.univariate
    ]
    interactions = [
        {
            "pair": list(t.features),
            "cuts_x": t.edges_x.cuts.tolist(),
            "cuts_y": t.edges_y.cuts.tolist(),
            "matrix": t.matrix.tolist(),
            "train_weight": t.train_weight.tolist(),
            "edited": t.features in edited_pairs,
        }
        for t in model.interactions
    ]
    return {
        "intercept": model.intercept,
        "provenance": model.provenance,
        "univariate": univariate,
        "interactions": interactions,
        "model_hash": model_hash(model),
    }


def _eval_payload(session: Session, ds: Dataset) -> dict:
    out = {}
    for which, model in (("base", session.base), ("working", session.working)):
        key = (model_hash(model),)
        if key not in session.eval_cache:
            session.eval_cache[key] = {
                split: evaluate(model, ds, split).to_dict()
                for split in ("validation", "test")
            }
        out[which] = session.eval_cache[key]
    out["delta"] = {
        split: {
            metric: out["working"][split][metric] - out["base"][split][metric]
            for metric in ("accuracy", "precision", "recall", "f1", "auc")
        }
        for split in ("validation", "test")
    }
    return out


def create_app(base_model: EbmModel, dataset: Dataset, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="glassboost editing service")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session: {session_id}")
        return session

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest | None = None):
        model = base_model
        if req is not None and req.model_path:
            try:
                model = load_model(req.model_path)
            except (OSError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        session = Session(session_id=uuid.uuid4().hex[:12], base=model, working=model)
        sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "model_hash": model_hash(model),
            "feature_names": list(model.feature_names),
            "n_terms": len(model.univariate) + len(model.interactions),
        }

    @app.get("/sessions/{session_id}/terms")
    def get_terms(session_id: str, which: str = "working"):
        session = get_session(session_id)
        model = session.working if which == "working" else session.base
        return JSONResponse(_clean(_term_payload(model)))

    @app.post("/sessions/{session_id}/fit-preview")
    def fit_preview(session_id: str, req: FitPreviewRequest):
        session = get_session(session_id)
        model = session.working
        try:
            points = sample_curve(model, req.feature, req.n_samples)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        if req.family == "step":
            try:
                step = StepFunctionSpec(tuple(req.breakpoints), tuple(req.levels))
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            fitted = step.predict(points[:, 0])
            payload = {"replacement": step.to_dict(), "sse": float(np.sum(
                (fitted - points[:, 1]) ** 2))}
            selected = np.ones(points.shape[0], dtype=bool)
        else:
            try:
                region = select_trusted(req.feature, points, req.excluded)
                params, sse = fit_sigmoid(region.selected_x, region.selected_y, req.direction)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            fitted = params.predict(points[:, 0])
            selected = region.selected_mask
            payload = {"replacement": params.to_dict(), "sse": sse}
        payload.update(
            {
                "feature": req.feature,
                "sampled": points.tolist(),
                "selected": selected.astype(bool).tolist(),
                "fitted": np.asarray(fitted, dtype=float).tolist(),
            }
        )
        return JSONResponse(_clean(payload))

    @app.post("/sessions/{session_id}/replacement-preview")
    def replacement_preview(session_id: str, req: ReplacementPreviewRequest):
        session = get_session(session_id)
        model = session.working
        try:
            term = model.interaction_for(req.pair)
            synth = synthesize_interaction(model, req.pair)
            rescaled = rescale_to_range(
                synth, float(term.matrix.min()), float(term.matrix.max())
            )
            policy = ReplacementPolicy(pair=term.features, metric=req.metric,
                                       epsilon=req.epsilon)
            _, report = selective_replace(term.matrix, rescaled, policy)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        delta = report.delta
        finite = delta[np.isfinite(delta)]
        payload = {
            "pair": list(term.features),
            "metric": req.metric,
            "epsilon": req.epsilon,
            "mask": report.mask.astype(int).tolist(),
            "replaced_fraction": report.replaced_fraction,
            "synth_rescaled": rescaled.tolist(),
            "original": term.matrix.tolist(),
            "delta_stats": {
                "min": float(finite.min()) if finite.size else None,
                "max": float(finite.max()) if finite.size else None,
                "mean": float(finite.mean()) if finite.size else None,
                "infinite_cells": int(np.sum(~np.isfinite(delta))),
            },
        }
        return JSONResponse(_clean(payload))

    @app.post("/sessions/{session_id}/edits")
    def apply_edits(session_id: str, req: ApplyEditsRequest):
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session busy: concurrent edit in progress")
        try:
            bundle = parse_edit_spec({"univariate": req.univariate,
                                      "interactions": req.interactions})
            try:
                edited, reports = apply_domain_edits(session.working, bundle)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            session.undo_stack.append(session.working)
            del session.undo_stack[:-UNDO_DEPTH]
            session.working = edited
            payload = {
                "model_hash": model_hash(edited),
                "provenance": edited.provenance,
                "edit_log_length": len(edited.edit_log),
                "reports": [
                    {
                        "pair": list(r.pair),
                        "metric": r.metric,
                        "epsilon": r.epsilon,
                        "replaced_fraction": r.replaced_fraction,
                    }
                    for r in reports
                ],
                "eval": _eval_payload(session, dataset),
            }
            return JSONResponse(_clean(payload))
        finally:
            session.lock.release()

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session busy: concurrent edit in progress")
        try:
            if not session.undo_stack:
                raise HTTPException(status_code=409, detail="nothing to undo")
            session.working = session.undo_stack.pop()
            return {"model_hash": model_hash(session.working),
                    "undo_depth": len(session.undo_stack)}
        finally:
            session.lock.release()

    @app.get("/sessions/{session_id}/eval")
    def get_eval(session_id: str):
        session = get_session(session_id)
        return JSONResponse(_clean(_eval_payload(session, dataset)))

    @app.get("/sessions/{session_id}/explain/{site_id}")
    def get_explanation(session_id: str, site_id: int, which: str = "working"):
        session = get_session(session_id)
        model = session.working if which == "working" else session.base
        try:
            exp = explain_site(model, dataset, site_id)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return JSONResponse(_clean(exp.to_dict()))

    @app.get("/health")
    def health():
        return {"status": "ok", "sessions": len(sessions)}

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
