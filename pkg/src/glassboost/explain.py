"""Model evaluation and explanation artifacts.

Provides threshold metrics with a rank-based AUC, confusion counts, mean
absolute score term importance, exact per-term local attributions, and
model-vs-model prediction transition maps. All computations are pure reads of
immutable models and datasets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.stats import rankdata

from .data import Dataset
from .model import EbmModel

OUTCOMES = ("TP", "TN", "FP", "FN")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def fractions(self) -> dict[str, float]:
        n = self.n
        return {"TP": self.tp / n, "FP": self.fp / n, "TN": self.tn / n, "FN": self.fn / n}

    def to_dict(self) -> dict:
        return {"TP": self.tp, "FP": self.fp, "TN": self.tn, "FN": self.fn,
                "fractions": self.fractions()}


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    confusion: ConfusionCounts
    auc_defined: bool = True
    degenerate_precision: bool = False
    degenerate_recall: bool = False

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "auc_defined": self.auc_defined,
            "confusion": self.confusion.to_dict(),
        }


def auc_score(scores, labels) -> float:
    """Mann-Whitney AUC with half credit for ties."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    ranks = rankdata(scores)
    return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def _split_arrays(model: EbmModel, ds: Dataset, split: str) -> tuple[np.ndarray, np.ndarray]:
    sub = ds.subset(split)
    if sub.n == 0:
        raise ValueError(f"split {split!r} is empty")
    if tuple(sub.feature_names) != tuple(model.feature_names):
        raise ValueError("dataset features do not match the model")
    return sub.X, sub.y.astype(int)


def confusion(model: EbmModel, ds: Dataset, split: str, threshold: float = 0.5) -> ConfusionCounts:
    X, y = _split_arrays(model, ds, split)
    pred = (model.proba_rows(X) >= threshold).astype(int)
    return ConfusionCounts(
        tp=int(np.sum((pred == 1) & (y == 1))),
        fp=int(np.sum((pred == 1) & (y == 0))),
        tn=int(np.sum((pred == 0) & (y == 0))),
        fn=int(np.sum((pred == 0) & (y == 1))),
    )


def evaluate(model: EbmModel, ds: Dataset, split: str, threshold: float = 0.5) -> EvalReport:
    """Threshold metrics plus rank AUC on one split.

    Zero-denominator precision/recall report 0.0 with a degeneracy flag; a
    single-class split leaves AUC flagged undefined rather than guessed.
    """
    X, y = _split_arrays(model, ds, split)
    scores = model.score_rows(X)
    pred = ((1.0 / (1.0 + np.exp(-scores))) >= threshold).astype(int)
    cm = ConfusionCounts(
        tp=int(np.sum((pred == 1) & (y == 1))),
        fp=int(np.sum((pred == 1) & (y == 0))),
        tn=int(np.sum((pred == 0) & (y == 0))),
        fn=int(np.sum((pred == 0) & (y == 1))),
    )
    accuracy = (cm.tp + cm.tn) / cm.n
    degenerate_p = (cm.tp + cm.fp) == 0
    degenerate_r = (cm.tp + cm.fn) == 0
    precision = 0.0 if degenerate_p else cm.tp / (cm.tp + cm.fp)
    recall = 0.0 if degenerate_r else cm.tp / (cm.tp + cm.fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    both_classes = (y == 1).any() and (y == 0).any()
    auc = auc_score(scores, y) if both_classes else float("nan")
    return EvalReport(
        accuracy=float(accuracy),
        precision=float(precision),
        recall=float(recall),
        f1=float(f1),
        auc=float(auc),
        confusion=cm,
        auc_defined=bool(both_classes),
        degenerate_precision=degenerate_p,
        degenerate_recall=degenerate_r,
    )


# -- global importance ---------------------------------------------------------


@dataclass(frozen=True)
class ImportanceRanking:
    """Per-term mean absolute score over a split, sorted descending."""

    entries: tuple[tuple[str, float], ...]

    def value_of(self, term_name: str) -> float:
        for name, value in self.entries:
            if name == term_name:
                return value
        raise KeyError(f"unknown term: {term_name}")

    def rank_of(self, term_name: str) -> int:
        for rank, (name, _) in enumerate(self.entries, start=1):
            if name == term_name:
                return rank
        raise KeyError(f"unknown term: {term_name}")

    @property
    def top(self) -> str:
        return self.entries[0][0]

    def to_dict(self) -> dict:
        return {"entries": [[n, v] for n, v in self.entries]}


def importance(model: EbmModel, ds: Dataset, split: str = "train") -> ImportanceRanking:
    """Mean absolute contribution of every term across the split's rows."""
    X, _ = _split_arrays(model, ds, split)
    names, contrib = model.contributions_rows(X)
    values = np.mean(np.abs(contrib), axis=0)
    order = sorted(range(len(names)), key=lambda i: (-values[i], i))
    return ImportanceRanking(tuple((names[i], float(values[i])) for i in order))


# -- local explanation -----------------------------------------------------------


@dataclass(frozen=True)
class LocalExplanation:
    site_id: int | None
    intercept: float
    contributions: tuple[tuple[str, float], ...]
    score: float
    probability: float
    label: int

    def contribution_of(self, term_name: str) -> float:
        for name, value in self.contributions:
            if name == term_name:
                return value
        raise KeyError(f"unknown term: {term_name}")

    def to_dict(self) -> dict:
        return {
            "site_id": self.site_id,
            "intercept": self.intercept,
            "contributions": [[n, v] for n, v in self.contributions],
            "score": self.score,
            "probability": self.probability,
            "label": self.label,
        }


def local_explain(model: EbmModel, x: Mapping[str, float], site_id: int | None = None,
                  threshold: float = 0.5) -> LocalExplanation:
    """Exact per-term attribution: intercept + contributions = score."""
    row = np.array([[float(x[f]) for f in model.feature_names]])
    names, contrib = model.contributions_rows(row)
    values = contrib[0]
    score = model.intercept + float(values.sum())
    proba = float(1.0 / (1.0 + np.exp(-score)))
    order = sorted(range(len(names)), key=lambda i: (-abs(values[i]), i))
    return LocalExplanation(
        site_id=site_id,
        intercept=model.intercept,
        contributions=tuple((names[i], float(values[i])) for i in order),
        score=score,
        probability=proba,
        label=int(proba >= threshold),
    )


def explain_site(model: EbmModel, ds: Dataset, site_id: int) -> LocalExplanation:
    return local_explain(model, ds.features_of(site_id), site_id=site_id)


# -- model comparison --------------------------------------------------------------


@dataclass(frozen=True)
class TransitionMap:
    """Per-site classification outcome under two models plus aggregate counts."""

    split: str
    site_ids: tuple[int, ...]
    before: tuple[str, ...]
    after: tuple[str, ...]
    counts: dict[tuple[str, str], int]

    @property
    def n(self) -> int:
        return len(self.site_ids)

    def count(self, before: str, after: str) -> int:
        return self.counts.get((before, after), 0)

    def to_rows(self) -> list[dict]:
        return [
            {"site_id": sid, "before": b, "after": a}
            for sid, b, a in zip(self.site_ids, self.before, self.after)
        ]

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "counts": {f"{b}->{a}": v for (b, a), v in sorted(self.counts.items())},
            "n": self.n,
        }


def _outcomes(model: EbmModel, X: np.ndarray, y: np.ndarray, threshold: float) -> np.ndarray:
    pred = (model.proba_rows(X) >= threshold).astype(int)
    out = np.empty(y.size, dtype=object)
    out[(pred == 1) & (y == 1)] = "TP"
    out[(pred == 0) & (y == 0)] = "TN"
    out[(pred == 1) & (y == 0)] = "FP"
    out[(pred == 0) & (y == 1)] = "FN"
    return out


def compare_models(
    model_a: EbmModel, model_b: EbmModel, ds: Dataset, split: str, threshold: float = 0.5
) -> TransitionMap:
    """Classification outcome per site under both models and transition counts."""
    if tuple(model_a.feature_names) != tuple(model_b.feature_names):
        raise ValueError("models must share the same features")
    sub = ds.subset(split)
    if sub.n == 0:
        raise ValueError(f"split {split!r} is empty")
    y = sub.y.astype(int)
    before = _outcomes(model_a, sub.X, y, threshold)
    after = _outcomes(model_b, sub.X, y, threshold)
    counts: dict[tuple[str, str], int] = {}
    for b, a in zip(before, after):
        counts[(b, a)] = counts.get((b, a), 0) + 1
    return TransitionMap(
        split=split,
        site_ids=tuple(int(s) for s in sub.site_ids),
        before=tuple(before),
        after=tuple(after),
        counts=counts,
    )
