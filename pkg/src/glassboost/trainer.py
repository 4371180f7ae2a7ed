"""Cyclic gradient boosting of binned shape functions with early stopping.

Training fits the logistic log-loss by least-squares stumps on gradient
residuals (y - p). One cycle fits one shallow tree per feature, in dataset
column order, each added with a small learning rate. After the univariate
stage, candidate feature pairs are ranked by the residual sum-of-squares
reduction of a single quadrant stump on a binned 2-D grid, and the top pairs
are boosted the same cyclic way. Everything is deterministic: same data and
config give a byte-identical model.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.special import expit

from .data import Dataset
from .model import BinEdges, EbmModel, InteractionTerm, UnivariateTerm, center_terms

LogFn = Callable[[dict], None]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    max_rounds: int = 5000
    max_leaves: int = 3
    early_stopping_rounds: int = 50
    n_interactions: int = 10
    seed: int = 0
    max_univariate_bins: int = 256
    interaction_bins: int = 30

    def __post_init__(self):
        if not (0.0 <= self.learning_rate <= 1.0):
            raise ValueError(f"learning_rate must be in [0, 1], got {self.learning_rate}")
        if self.max_leaves < 2:
            raise ValueError(f"max_leaves must be >= 2, got {self.max_leaves}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.early_stopping_rounds < 1:
            raise ValueError("early_stopping_rounds must be >= 1")
        if self.n_interactions < 0:
            raise ValueError("n_interactions must be >= 0")
        if self.max_univariate_bins < 2 or self.interaction_bins < 2:
            raise ValueError("bin counts must be >= 2")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "max_rounds": self.max_rounds,
            "max_leaves": self.max_leaves,
            "early_stopping_rounds": self.early_stopping_rounds,
            "n_interactions": self.n_interactions,
            "seed": self.seed,
            "max_univariate_bins": self.max_univariate_bins,
            "interaction_bins": self.interaction_bins,
        }


@dataclass
class BoostState:
    """Mutable per-stage boosting state: row scores, residuals, stall tracking."""

    y: np.ndarray
    val_y: np.ndarray
    train_scores: np.ndarray
    val_scores: np.ndarray
    residuals: np.ndarray
    patience: int
    hessian: np.ndarray | None = None
    cycle: int = 0
    best_loss: float = math.inf
    best_cycle: int = -1
    stall: int = 0

    def refresh_residuals(self) -> None:
        p = expit(self.train_scores)
        self.residuals = self.y - p
        self.hessian = p * (1.0 - p)

    def reset_stage(self) -> None:
        self.cycle = 0
        self.best_loss = math.inf
        self.best_cycle = -1
        self.stall = 0


def log_loss_from_scores(scores: np.ndarray, y: np.ndarray) -> float:
    """Mean logistic log-loss from raw scores; stable for large |score|."""
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.mean(np.logaddexp(0.0, scores) - y * scores))


def init_intercept(train: Dataset) -> float:
    """Log-odds of the positive fraction in the training split."""
    p = float(np.mean(train.y))
    if p <= 0.0 or p >= 1.0:
        raise ValueError("training data must contain both classes")
    return math.log(p / (1.0 - p))


def build_bins(train, feature: str, max_bins: int) -> BinEdges:
    """Quantile cuts over the distinct feature values, capped at max_bins - 1.

    A constant feature yields a single bin and a warning rather than an error.
    """
    values = train.column(feature) if isinstance(train, Dataset) else np.asarray(train, float)
    if values.size == 0:
        raise ValueError(f"{feature}: no values to bin")
    distinct = np.unique(values)
    if distinct.size < 2:
        warnings.warn(f"{feature}: constant feature, single bin", stacklevel=2)
        return BinEdges(feature, np.array([]))
    n_cuts = min(max_bins, distinct.size) - 1
    qs = np.arange(1, n_cuts + 1) / (n_cuts + 1)
    cuts = np.unique(np.quantile(distinct, qs))
    return BinEdges(feature, cuts)


# -- stumps -------------------------------------------------------------------


_LOWER_TRI_NEG_INF: dict[int, np.ndarray] = {}


def _lower_tri_neg_inf(n: int) -> np.ndarray:
    """Additive mask: -inf strictly below the diagonal, 0 elsewhere."""
    cached = _LOWER_TRI_NEG_INF.get(n)
    if cached is None:
        idx = np.arange(n)
        cached = np.where(idx[:, None] > idx[None, :], -np.inf, 0.0)
        cached.flags.writeable = False
        _LOWER_TRI_NEG_INF[n] = cached
    return cached


def _segment_gain_matrix(prefix_sum: np.ndarray, prefix_count: np.ndarray) -> np.ndarray:
    """G[i, j] = (sum over bins [i, j))^2 / count, the SSE reduction of one leaf.

    Entries strictly below the diagonal are -inf so the stump DP never picks a
    backwards segment; empty segments (equal counts) contribute 0.
    """
    d_s = np.subtract.outer(prefix_sum, prefix_sum)
    np.multiply(d_s, d_s, out=d_s)
    d_c = np.subtract.outer(prefix_count, prefix_count)
    np.negative(d_c, out=d_c)  # [i, j] = count over bins [i, j)
    invalid = d_c <= 0
    d_c[invalid] = 1.0
    np.divide(d_s, d_c, out=d_s)
    d_s[invalid] = 0.0
    d_s += _lower_tri_neg_inf(prefix_sum.size)
    return d_s


def _fit_stump_binned(
    bin_sum: np.ndarray, bin_count: np.ndarray, max_leaves: int
) -> tuple[np.ndarray, float]:
    """Optimal contiguous partition of bins into <= max_leaves mean-predicting leaves.

    Dynamic program over segment boundaries; exact, so it matches exhaustive
    enumeration of split positions. Returns (per-bin table, gain).
    """
    n_bins = bin_sum.size
    prefix_sum = np.concatenate(([0.0], np.cumsum(bin_sum)))
    prefix_count = np.concatenate(([0.0], np.cumsum(bin_count)))
    gain_ij = _segment_gain_matrix(prefix_sum, prefix_count)

    idx = np.arange(n_bins + 1)
    best = np.maximum(gain_ij[0, :], 0.0)
    parents: list[np.ndarray] = []
    for _ in range(max_leaves - 1):
        total = best[:, None] + gain_ij
        arg = np.argmax(total, axis=0)
        parents.append(arg)
        best = total[arg, idx]

    bounds = [n_bins]
    j = n_bins
    for arg in reversed(parents):
        j = int(arg[j])
        bounds.append(j)
    bounds.append(0)
    bounds = sorted(set(bounds))

    table = np.zeros(n_bins)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        cnt = prefix_count[hi] - prefix_count[lo]
        if hi > lo and cnt > 0:
            table[lo:hi] = (prefix_sum[hi] - prefix_sum[lo]) / cnt
    return table, float(best[n_bins])


def fit_stump(residuals, values, edges: BinEdges, max_leaves: int) -> np.ndarray:
    """Least-squares regression stump on a binned feature, as a per-bin table.

    Leaves partition the bins into contiguous runs; each bin receives its
    leaf's mean residual. Bins in an empty leaf receive 0.
    """
    residuals = np.asarray(residuals, dtype=float)
    values = np.asarray(values, dtype=float)
    if residuals.size == 0:
        raise ValueError("empty input")
    if residuals.shape != values.shape:
        raise ValueError("residuals and values must align")
    if max_leaves < 1:
        raise ValueError("max_leaves must be >= 1")
    idx = edges.bin_indices(values)
    sums = np.bincount(idx, weights=residuals, minlength=edges.n_bins)
    counts = np.bincount(idx, minlength=edges.n_bins).astype(float)
    table, _ = _fit_stump_binned(sums, counts, max_leaves)
    return table


def _gain_safe(s: np.ndarray, c: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(c > 0, s * s / np.where(c > 0, c, 1.0), 0.0)


def _fit_split_pair_along_rows(
    cell_sum: np.ndarray, cell_count: np.ndarray
) -> tuple[float, int, int, int]:
    """Best 2-level tree cutting rows first: rows < i get one column cut,
    rows >= i another. Returns (gain, i, j_low, j_high)."""
    rows, cols = cell_sum.shape
    # top[i, j]: sums over rows < i, cols < j; one matrix pass covers all cuts
    top_s = np.zeros((rows + 1, cols + 1))
    top_s[1:, 1:] = np.cumsum(np.cumsum(cell_sum, axis=0), axis=1)
    top_c = np.zeros((rows + 1, cols + 1))
    top_c[1:, 1:] = np.cumsum(np.cumsum(cell_count, axis=0), axis=1)
    bot_s = top_s[-1:, :] - top_s
    bot_c = top_c[-1:, :] - top_c

    top_gain = _gain_safe(top_s, top_c) + _gain_safe(
        top_s[:, -1:] - top_s, top_c[:, -1:] - top_c
    )
    bot_gain = _gain_safe(bot_s, bot_c) + _gain_safe(
        bot_s[:, -1:] - bot_s, bot_c[:, -1:] - bot_c
    )
    j_low = np.argmax(top_gain, axis=1)
    j_high = np.argmax(bot_gain, axis=1)
    idx = np.arange(rows + 1)
    total = top_gain[idx, j_low] + bot_gain[idx, j_high]
    i = int(np.argmax(total))
    return float(total[i]), i, int(j_low[i]), int(j_high[i])


def _fit_quadrant_stump(
    cell_sum: np.ndarray, cell_count: np.ndarray
) -> tuple[np.ndarray, float]:
    """Best two-level axis-aligned tree (<= 4 leaves) on a binned 2-D grid.

    The first cut splits one axis; each side then gets its own cut on the
    other axis. Both axis orders are searched; degenerate cuts at the grid
    border cover the 1- and 2-leaf cases. Returns (increment matrix, gain).
    """
    rows, cols = cell_sum.shape
    gain_r, i_r, jl_r, jh_r = _fit_split_pair_along_rows(cell_sum, cell_count)
    gain_c, i_c, jl_c, jh_c = _fit_split_pair_along_rows(cell_sum.T, cell_count.T)

    def leaf(region_sum: float, region_count: float) -> float:
        return float(region_sum / region_count) if region_count > 0 else 0.0

    inc = np.empty((rows, cols))
    if gain_r >= gain_c:
        blocks = [
            (slice(0, i_r), slice(0, jl_r)),
            (slice(0, i_r), slice(jl_r, cols)),
            (slice(i_r, rows), slice(0, jh_r)),
            (slice(i_r, rows), slice(jh_r, cols)),
        ]
        for rs, cs in blocks:
            inc[rs, cs] = leaf(cell_sum[rs, cs].sum(), cell_count[rs, cs].sum())
        return inc, gain_r
    blocks = [
        (slice(0, jl_c), slice(0, i_c)),
        (slice(jl_c, rows), slice(0, i_c)),
        (slice(0, jh_c), slice(i_c, cols)),
        (slice(jh_c, rows), slice(i_c, cols)),
    ]
    for rs, cs in blocks:
        inc[rs, cs] = leaf(cell_sum[rs, cs].sum(), cell_count[rs, cs].sum())
    return inc, gain_c


# -- early stopping -----------------------------------------------------------


def early_stop_check(state: BoostState, val_loss: float) -> str:
    """Update best/stall bookkeeping; 'stop' after patience non-improving cycles."""
    if val_loss < state.best_loss:
        state.best_loss = val_loss
        state.best_cycle = state.cycle
        state.stall = 0
        return "continue"
    state.stall += 1
    return "stop" if state.stall >= state.patience else "continue"


# -- univariate stage -----------------------------------------------------------


@dataclass
class _FeatureBins:
    feature: str
    edges: BinEdges
    idx_train: np.ndarray
    idx_val: np.ndarray
    counts: np.ndarray


def boost_univariate(
    state: BoostState,
    tables: dict[str, np.ndarray],
    feats: list[_FeatureBins],
    config: TrainConfig,
    log: LogFn | None = None,
) -> None:
    """Run the univariate boosting stage in place, restoring the best cycle.

    Each cycle fits one stump per feature on the current residuals and adds
    learning_rate times the stump into that feature's table, refreshing
    scores and residuals after each feature. Leaf values take a Newton step
    (gradient sum over hessian sum), so saturated bins keep moving at a
    useful pace under the small learning rate.
    """
    state.reset_stage()
    state.cycle = 0
    init_loss = log_loss_from_scores(state.val_scores, state.val_y)
    early_stop_check(state, init_loss)
    snapshot = {f.feature: tables[f.feature].copy() for f in feats}

    for cycle in range(1, config.max_rounds + 1):
        for fb in feats:
            sums = np.bincount(fb.idx_train, weights=state.residuals, minlength=fb.edges.n_bins)
            hess = np.bincount(fb.idx_train, weights=state.hessian, minlength=fb.edges.n_bins)
            stump, _ = _fit_stump_binned(sums, hess, config.max_leaves)
            inc = config.learning_rate * stump
            tables[fb.feature] += inc
            state.train_scores += inc[fb.idx_train]
            state.val_scores += inc[fb.idx_val]
            state.refresh_residuals()
            if not np.all(np.isfinite(state.train_scores)):
                raise ArithmeticError(f"non-finite scores at cycle {cycle} ({fb.feature})")
        state.cycle = cycle
        val_loss = log_loss_from_scores(state.val_scores, state.val_y)
        decision = early_stop_check(state, val_loss)
        if state.best_cycle == cycle:
            snapshot = {f.feature: tables[f.feature].copy() for f in feats}
        if log is not None:
            log(
                {
                    "stage": "univariate",
                    "cycle": cycle,
                    "train_loss": log_loss_from_scores(state.train_scores, state.y),
                    "val_loss": val_loss,
                }
            )
        if decision == "stop":
            break

    for fb in feats:
        delta = snapshot[fb.feature] - tables[fb.feature]
        state.train_scores += delta[fb.idx_train]
        state.val_scores += delta[fb.idx_val]
        tables[fb.feature] = snapshot[fb.feature]
    state.refresh_residuals()


# -- interaction ranking and stage ---------------------------------------------


@dataclass(frozen=True)
class CandidatePair:
    pair: tuple[str, str]
    gain: float


def rank_interactions(model: EbmModel, train: Dataset, config: TrainConfig) -> list[CandidatePair]:
    """Rank feature pairs by the gain of one quadrant stump on current residuals.

    Returns the top ``config.n_interactions`` pairs, ties broken by pair index
    order so the ranking is always total.
    """
    names = model.feature_names
    pairs = list(combinations(range(len(names)), 2))
    if config.n_interactions > len(pairs):
        raise ValueError(
            f"n_interactions={config.n_interactions} exceeds {len(pairs)} candidate pairs"
        )
    proba = model.proba_rows(train.X)
    residuals = train.y.astype(float) - proba
    hessian = proba * (1.0 - proba)
    ranked: list[tuple[float, int, CandidatePair]] = []
    for order, (i, j) in enumerate(pairs):
        ex = build_bins(train, names[i], config.interaction_bins)
        ey = build_bins(train, names[j], config.interaction_bins)
        bx = ex.bin_indices(train.column(names[i]))
        by = ey.bin_indices(train.column(names[j]))
        flat = bx * ey.n_bins + by
        size = ex.n_bins * ey.n_bins
        sums = np.bincount(flat, weights=residuals, minlength=size).reshape(ex.n_bins, ey.n_bins)
        hess = np.bincount(flat, weights=hessian, minlength=size).reshape(ex.n_bins, ey.n_bins)
        _, gain = _fit_quadrant_stump(sums, hess)
        ranked.append((-gain, order, CandidatePair((names[i], names[j]), gain)))
    ranked.sort(key=lambda t: (t[0], t[1]))
    return [c for _, _, c in ranked[: config.n_interactions]]


@dataclass
class _PairBins:
    pair: tuple[str, str]
    edges_x: BinEdges
    edges_y: BinEdges
    flat_train: np.ndarray
    flat_val: np.ndarray
    counts: np.ndarray


def boost_interactions(
    state: BoostState,
    matrices: dict[tuple[str, str], np.ndarray],
    pairs: list[_PairBins],
    config: TrainConfig,
    log: LogFn | None = None,
) -> None:
    """Cyclic boosting over the selected pairs; univariate tables stay frozen."""
    if not pairs:
        return
    state.reset_stage()
    init_loss = log_loss_from_scores(state.val_scores, state.val_y)
    early_stop_check(state, init_loss)
    snapshot = {pb.pair: matrices[pb.pair].copy() for pb in pairs}

    for cycle in range(1, config.max_rounds + 1):
        for pb in pairs:
            shape = matrices[pb.pair].shape
            size = shape[0] * shape[1]
            sums = np.bincount(
                pb.flat_train, weights=state.residuals, minlength=size
            ).reshape(shape)
            hess = np.bincount(
                pb.flat_train, weights=state.hessian, minlength=size
            ).reshape(shape)
            inc_matrix, _ = _fit_quadrant_stump(sums, hess)
            inc_matrix *= config.learning_rate
            matrices[pb.pair] += inc_matrix
            flat_inc = inc_matrix.ravel()
            state.train_scores += flat_inc[pb.flat_train]
            state.val_scores += flat_inc[pb.flat_val]
            state.refresh_residuals()
            if not np.all(np.isfinite(state.train_scores)):
                raise ArithmeticError(f"non-finite scores at cycle {cycle} ({pb.pair})")
        state.cycle = cycle
        val_loss = log_loss_from_scores(state.val_scores, state.val_y)
        decision = early_stop_check(state, val_loss)
        if state.best_cycle == cycle:
            snapshot = {pb.pair: matrices[pb.pair].copy() for pb in pairs}
        if log is not None:
            log(
                {
                    "stage": "interactions",
                    "cycle": cycle,
                    "train_loss": log_loss_from_scores(state.train_scores, state.y),
                    "val_loss": val_loss,
                }
            )
        if decision == "stop":
            break

    for pb in pairs:
        delta = (snapshot[pb.pair] - matrices[pb.pair]).ravel()
        state.train_scores += delta[pb.flat_train]
        state.val_scores += delta[pb.flat_val]
        matrices[pb.pair] = snapshot[pb.pair]
    state.refresh_residuals()


# -- full pipeline ---------------------------------------------------------------


def train(
    train_ds: Dataset,
    validation_ds: Dataset,
    config: TrainConfig = TrainConfig(),
    log: LogFn | None = None,
) -> EbmModel:
    """Full training pipeline: intercept, bins, univariate boost, pair ranking,
    interaction boost, centering. Deterministic for fixed data and config."""
    if validation_ds.n == 0:
        raise ValueError("validation set must be nonempty")
    names = train_ds.feature_names
    intercept = init_intercept(train_ds)

    feats: list[_FeatureBins] = []
    for f in names:
        edges = build_bins(train_ds, f, config.max_univariate_bins)
        idx_tr = edges.bin_indices(train_ds.column(f))
        feats.append(
            _FeatureBins(
                feature=f,
                edges=edges,
                idx_train=idx_tr,
                idx_val=edges.bin_indices(validation_ds.column(f)),
                counts=np.bincount(idx_tr, minlength=edges.n_bins).astype(float),
            )
        )

    y = train_ds.y.astype(float)
    state = BoostState(
        y=y,
        val_y=validation_ds.y.astype(float),
        train_scores=np.full(train_ds.n, intercept),
        val_scores=np.full(validation_ds.n, intercept),
        residuals=np.empty(train_ds.n),
        patience=config.early_stopping_rounds,
    )
    state.refresh_residuals()

    tables = {f.feature: np.zeros(f.edges.n_bins) for f in feats}
    boost_univariate(state, tables, feats, config, log)

    def univariate_terms() -> tuple[UnivariateTerm, ...]:
        return tuple(
            UnivariateTerm(
                feature=fb.feature,
                edges=fb.edges,
                scores=tables[fb.feature],
                train_weight=fb.counts,
                train_range=(
                    float(train_ds.column(fb.feature).min()),
                    float(train_ds.column(fb.feature).max()),
                ),
            )
            for fb in feats
        )

    interactions: tuple[InteractionTerm, ...] = ()
    if config.n_interactions > 0:
        stage_model = EbmModel(
            intercept=intercept,
            univariate=univariate_terms(),
            interactions=(),
            feature_names=names,
        )
        selected = rank_interactions(stage_model, train_ds, config)
        pair_bins: list[_PairBins] = []
        for cand in selected:
            fx, fy = cand.pair
            ex = build_bins(train_ds, fx, config.interaction_bins)
            ey = build_bins(train_ds, fy, config.interaction_bins)
            bx_tr = ex.bin_indices(train_ds.column(fx))
            by_tr = ey.bin_indices(train_ds.column(fy))
            bx_va = ex.bin_indices(validation_ds.column(fx))
            by_va = ey.bin_indices(validation_ds.column(fy))
            flat_tr = bx_tr * ey.n_bins + by_tr
            counts = (
                np.bincount(flat_tr, minlength=ex.n_bins * ey.n_bins)
                .astype(float)
                .reshape(ex.n_bins, ey.n_bins)
            )
            pair_bins.append(
                _PairBins(
                    pair=cand.pair,
                    edges_x=ex,
                    edges_y=ey,
                    flat_train=flat_tr,
                    flat_val=bx_va * ey.n_bins + by_va,
                    counts=counts,
                )
            )
        matrices = {pb.pair: np.zeros((pb.edges_x.n_bins, pb.edges_y.n_bins)) for pb in pair_bins}
        boost_interactions(state, matrices, pair_bins, config, log)
        interactions = tuple(
            InteractionTerm(
                features=pb.pair,
                edges_x=pb.edges_x,
                edges_y=pb.edges_y,
                matrix=matrices[pb.pair],
                train_weight=pb.counts,
            )
            for pb in pair_bins
        )

    model = EbmModel(
        intercept=intercept,
        univariate=univariate_terms(),
        interactions=interactions,
        feature_names=names,
    )
    return center_terms(model)
