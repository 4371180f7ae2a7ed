"""Additive glass-box model: an intercept plus binned shape-function terms.

Each term is a lookup table over feature bins. Univariate terms map one
feature value to a log-odds contribution; interaction terms map a feature
pair through a binned score grid. The total score is the intercept plus the
sum of all term lookups, and the logistic link converts scores to
probabilities. Models are immutable; edits produce new values.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.special import expit

MODEL_SCHEMA_VERSION = "glassboost-model/1"

#: Univariate terms carry at most this many cuts (bins = cuts + 1).
MAX_UNIVARIATE_CUTS = 255

PROVENANCE_TRAINED = "trained"
PROVENANCE_EDITED = "domain_informed"


class ModelFormatError(ValueError):
    """Model file is malformed or carries an unknown schema version."""


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def _require_finite_scalar(name: str, x) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")
    return x


@dataclass(frozen=True)
class BinEdges:
    """Right-closed bins over one feature: (-inf, c1], (c1, c2], ..., (ck, +inf).

    A value exactly on a cut belongs to the bin on its left; values beyond the
    outermost cuts clamp to the first/last bin.
    """

    feature: str
    cuts: np.ndarray

    def __post_init__(self):
        cuts = np.asarray(self.cuts, dtype=float)
        if cuts.ndim != 1:
            raise ValueError(f"{self.feature}: cuts must be one-dimensional")
        if not np.all(np.isfinite(cuts)):
            raise ValueError(f"{self.feature}: cuts must be finite")
        if cuts.size > 1 and not np.all(np.diff(cuts) > 0):
            raise ValueError(f"{self.feature}: cuts must be strictly increasing")
        object.__setattr__(self, "cuts", _frozen_array(cuts))

    @property
    def n_bins(self) -> int:
        return self.cuts.size + 1

    def bin_indices(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.feature}: lookup values must be finite")
        return np.searchsorted(self.cuts, values, side="left")

    def bin_of(self, x: float) -> int:
        _require_finite_scalar(f"{self.feature} value", x)
        return int(np.searchsorted(self.cuts, x, side="left"))

    def centers(self) -> np.ndarray:
        """Per-bin evaluation points.

        Interior bins use the midpoint of their cuts; the unbounded outer bins
        evaluate at the adjacent finite cut so replacement curves are never
        sampled at infinity.
        """
        c = self.cuts
        if c.size == 0:
            return np.array([0.0])
        mids = (c[:-1] + c[1:]) / 2.0
        return np.concatenate(([c[0]], mids, [c[-1]]))


@dataclass(frozen=True)
class UnivariateTerm:
    """Binned shape function for one feature, in log-odds units."""

    feature: str
    edges: BinEdges
    scores: np.ndarray
    train_weight: np.ndarray
    train_range: tuple[float, float]

    def __post_init__(self):
        if self.edges.feature != self.feature:
            raise ValueError("edges belong to a different feature")
        if self.edges.cuts.size > MAX_UNIVARIATE_CUTS:
            raise ValueError(
                f"{self.feature}: at most {MAX_UNIVARIATE_CUTS} cuts per univariate term"
            )
        scores = np.asarray(self.scores, dtype=float)
        weight = np.asarray(self.train_weight, dtype=float)
        if scores.shape != (self.edges.n_bins,):
            raise ValueError(f"{self.feature}: scores must have one entry per bin")
        if weight.shape != scores.shape:
            raise ValueError(f"{self.feature}: train_weight must match scores")
        if not np.all(np.isfinite(scores)):
            raise ValueError(f"{self.feature}: scores must be finite")
        if np.any(weight < 0):
            raise ValueError(f"{self.feature}: train_weight must be non-negative")
        lo, hi = (float(self.train_range[0]), float(self.train_range[1]))
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise ValueError(f"{self.feature}: invalid train_range {self.train_range}")
        object.__setattr__(self, "scores", _frozen_array(scores))
        object.__setattr__(self, "train_weight", _frozen_array(weight))
        object.__setattr__(self, "train_range", (lo, hi))

    @property
    def name(self) -> str:
        return self.feature

    def lookup(self, x: float) -> float:
        return float(self.scores[self.edges.bin_of(x)])

    def contributions(self, values) -> np.ndarray:
        return self.scores[self.edges.bin_indices(values)]

    def weighted_mean(self) -> float:
        total = float(self.train_weight.sum())
        if total <= 0:
            raise ValueError(f"{self.feature}: zero total train_weight")
        return float(np.dot(self.train_weight, self.scores) / total)


@dataclass(frozen=True)
class InteractionTerm:
    """Binned pairwise shape function: a score matrix over two features."""

    features: tuple[str, str]
    edges_x: BinEdges
    edges_y: BinEdges
    matrix: np.ndarray
    train_weight: np.ndarray

    def __post_init__(self):
        fx, fy = self.features
        if fx == fy:
            raise ValueError("interaction features must be distinct")
        if self.edges_x.feature != fx or self.edges_y.feature != fy:
            raise ValueError("interaction edges do not match the feature pair")
        matrix = np.asarray(self.matrix, dtype=float)
        weight = np.asarray(self.train_weight, dtype=float)
        expected = (self.edges_x.n_bins, self.edges_y.n_bins)
        if matrix.shape != expected:
            raise ValueError(f"{self.name}: matrix shape {matrix.shape} != {expected}")
        if weight.shape != expected:
            raise ValueError(f"{self.name}: train_weight shape mismatch")
        if not np.all(np.isfinite(matrix)):
            raise ValueError(f"{self.name}: matrix entries must be finite")
        if np.any(weight < 0):
            raise ValueError(f"{self.name}: train_weight must be non-negative")
        object.__setattr__(self, "features", (str(fx), str(fy)))
        object.__setattr__(self, "matrix", _frozen_array(matrix))
        object.__setattr__(self, "train_weight", _frozen_array(weight))

    @property
    def name(self) -> str:
        return f"{self.features[0]} x {self.features[1]}"

    def lookup(self, x: float, y: float) -> float:
        return float(self.matrix[self.edges_x.bin_of(x), self.edges_y.bin_of(y)])

    def contributions(self, xv, yv) -> np.ndarray:
        return self.matrix[self.edges_x.bin_indices(xv), self.edges_y.bin_indices(yv)]

    def weighted_mean(self) -> float:
        total = float(self.train_weight.sum())
        if total <= 0:
            raise ValueError(f"{self.name}: zero total train_weight")
        return float((self.train_weight * self.matrix).sum() / total)


@dataclass(frozen=True)
class EbmModel:
    """Intercept plus univariate and interaction terms; the full decision logic."""

    intercept: float
    univariate: tuple[UnivariateTerm, ...]
    interactions: tuple[InteractionTerm, ...]
    feature_names: tuple[str, ...]
    provenance: str = PROVENANCE_TRAINED
    edit_log: tuple[dict, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intercept", _require_finite_scalar("intercept", self.intercept))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "univariate", tuple(self.univariate))
        object.__setattr__(self, "interactions", tuple(self.interactions))
        object.__setattr__(self, "edit_log", tuple(self.edit_log))
        term_features = tuple(t.feature for t in self.univariate)
        if term_features != self.feature_names:
            raise ValueError("expected exactly one univariate term per feature, in order")
        index = {f: i for i, f in enumerate(self.feature_names)}
        seen = set()
        for term in self.interactions:
            a, b = term.features
            if a not in index or b not in index:
                raise ValueError(f"interaction references unknown feature: {term.features}")
            if index[a] >= index[b]:
                raise ValueError(f"interaction pair must follow feature order: {term.features}")
            if term.features in seen:
                raise ValueError(f"duplicate interaction pair: {term.features}")
            seen.add(term.features)
        if self.provenance not in (PROVENANCE_TRAINED, PROVENANCE_EDITED):
            raise ValueError(f"unknown provenance: {self.provenance}")

    # -- term access ------------------------------------------------------

    def term_for(self, feature: str) -> UnivariateTerm:
        for term in self.univariate:
            if term.feature == feature:
                return term
        raise KeyError(f"unknown feature: {feature}")

    def canonical_pair(self, pair) -> tuple[str, str]:
        a, b = pair
        index = {f: i for i, f in enumerate(self.feature_names)}
        if a not in index or b not in index:
            raise KeyError(f"unknown feature in pair: {pair}")
        return (a, b) if index[a] < index[b] else (b, a)

    def interaction_for(self, pair) -> InteractionTerm:
        want = self.canonical_pair(pair)
        for term in self.interactions:
            if term.features == want:
                return term
        raise KeyError(f"no interaction term for pair: {want}")

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.univariate) + tuple(t.name for t in self.interactions)

    # -- scoring ----------------------------------------------------------

    def score(self, x: Mapping[str, float]) -> float:
        """Total log-odds score: intercept + sum of all term lookups."""
        missing = [f for f in self.feature_names if f not in x]
        if missing:
            raise KeyError(f"missing features: {missing}")
        s = self.intercept
        for term in self.univariate:
            s += term.lookup(float(x[term.feature]))
        for term in self.interactions:
            s += term.lookup(float(x[term.features[0]]), float(x[term.features[1]]))
        return s

    def predict_proba(self, x: Mapping[str, float]) -> float:
        """Positive-class probability through the logistic link."""
        return float(expit(self.score(x)))

    def predict_label(self, x: Mapping[str, float], threshold: float = 0.5) -> int:
        if not (0.0 < threshold < 1.0):
            raise ValueError(f"threshold must be in (0, 1), got {threshold}")
        return int(self.predict_proba(x) >= threshold)

    def score_rows(self, X: np.ndarray) -> np.ndarray:
        """Vectorized scores for rows ordered by ``feature_names`` columns."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise ValueError("X must be (n_rows, n_features) in model feature order")
        col = {f: i for i, f in enumerate(self.feature_names)}
        s = np.full(X.shape[0], self.intercept)
        for term in self.univariate:
            s += term.contributions(X[:, col[term.feature]])
        for term in self.interactions:
            s += term.contributions(X[:, col[term.features[0]]], X[:, col[term.features[1]]])
        return s

    def proba_rows(self, X: np.ndarray) -> np.ndarray:
        return expit(self.score_rows(X))

    def contributions_rows(self, X: np.ndarray) -> tuple[tuple[str, ...], np.ndarray]:
        """Per-term contribution matrix (n_rows, n_terms), columns in term order."""
        X = np.asarray(X, dtype=float)
        col = {f: i for i, f in enumerate(self.feature_names)}
        out = np.empty((X.shape[0], len(self.univariate) + len(self.interactions)))
        k = 0
        for term in self.univariate:
            out[:, k] = term.contributions(X[:, col[term.feature]])
            k += 1
        for term in self.interactions:
            out[:, k] = term.contributions(
                X[:, col[term.features[0]]], X[:, col[term.features[1]]]
            )
            k += 1
        return self.term_names, out


# -- centering ---------------------------------------------------------------


def center_terms(model: EbmModel) -> EbmModel:
    """Shift every term to zero weighted mean, moving the shift into the intercept.

    Predictions are unchanged: the per-term means are subtracted from the
    tables and added back through the intercept.
    """
    shift = 0.0
    univariate = []
    for term in model.univariate:
        mu = term.weighted_mean()
        shift += mu
        univariate.append(replace(term, scores=term.scores - mu))
    interactions = []
    for term in model.interactions:
        mu = term.weighted_mean()
        shift += mu
        interactions.append(replace(term, matrix=term.matrix - mu))
    return replace(
        model,
        intercept=model.intercept + shift,
        univariate=tuple(univariate),
        interactions=tuple(interactions),
    )


# -- serialization -----------------------------------------------------------


def model_to_dict(model: EbmModel) -> dict:
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "intercept": model.intercept,
        "feature_names": list(model.feature_names),
        "provenance": model.provenance,
        "edit_log": [dict(e) for e in model.edit_log],
        "univariate": [
            {
                "feature": t.feature,
                "cuts": t.edges.cuts.tolist(),
                "scores": t.scores.tolist(),
                "train_weight": t.train_weight.tolist(),
                "train_range": list(t.train_range),
            }
            for t in model.univariate
        ],
        "interactions": [
            {
                "features": list(t.features),
                "cuts_x": t.edges_x.cuts.tolist(),
                "cuts_y": t.edges_y.cuts.tolist(),
                "matrix": t.matrix.tolist(),
                "train_weight": t.train_weight.tolist(),
            }
            for t in model.interactions
        ],
    }


def model_from_dict(doc: dict) -> EbmModel:
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ModelFormatError("not a model document: missing schema_version")
    if doc["schema_version"] != MODEL_SCHEMA_VERSION:
        raise ModelFormatError(
            f"unsupported model schema version {doc['schema_version']!r}; "
            f"expected {MODEL_SCHEMA_VERSION!r}"
        )
    try:
        univariate = tuple(
            UnivariateTerm(
                feature=u["feature"],
                edges=BinEdges(u["feature"], np.asarray(u["cuts"], dtype=float)),
                scores=np.asarray(u["scores"], dtype=float),
                train_weight=np.asarray(u["train_weight"], dtype=float),
                train_range=(u["train_range"][0], u["train_range"][1]),
            )
            for u in doc["univariate"]
        )
        interactions = tuple(
            InteractionTerm(
                features=(b["features"][0], b["features"][1]),
                edges_x=BinEdges(b["features"][0], np.asarray(b["cuts_x"], dtype=float)),
                edges_y=BinEdges(b["features"][1], np.asarray(b["cuts_y"], dtype=float)),
                matrix=np.asarray(b["matrix"], dtype=float),
                train_weight=np.asarray(b["train_weight"], dtype=float),
            )
            for b in doc["interactions"]
        )
        return EbmModel(
            intercept=float(doc["intercept"]),
            univariate=univariate,
            interactions=interactions,
            feature_names=tuple(doc["feature_names"]),
            provenance=doc.get("provenance", PROVENANCE_TRAINED),
            edit_log=tuple(doc.get("edit_log", [])),
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc


def model_to_json(model: EbmModel) -> str:
    """Canonical JSON text; numbers round-trip at full precision."""
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))


def save_model(model: EbmModel, path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def load_model(path) -> EbmModel:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(doc)


def model_hash(model: EbmModel) -> str:
    return hashlib.sha256(model_to_json(model).encode("utf-8")).hexdigest()
