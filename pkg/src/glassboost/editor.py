"""Domain-informed model surgery.

Univariate shape functions are sampled over their training range, trimmed to
an analyst-trusted region, refit with a monotone sigmoid-like curve (or
replaced outright by a step function), and written back into the model.
Interaction matrices are then synthesized from the edited univariate curves,
rescaled to the original score range, and selectively replace original cells
wherever a discrepancy metric exceeds a threshold. Every edit is recorded in
the model's edit log, and replaying the log on the original model reproduces
the edited model exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .model import EbmModel, PROVENANCE_EDITED, UnivariateTerm

METRICS = ("relative", "range")


# -- replacement curve families ------------------------------------------------


@dataclass(frozen=True)
class SigmoidParams:
    """Parameters of c / (1 + exp(-a (x - b))) + d.

    ``a`` is the steepness (positive by construction here), ``b`` the midpoint,
    ``c`` the amplitude, ``d`` the offset; sign(a * c) fixes the monotone
    direction.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"sigmoid parameters must be finite: {vals}")
        if self.a == 0:
            raise ValueError("sigmoid steepness a must be nonzero")

    @property
    def direction(self) -> str:
        return "increasing" if self.a * self.c > 0 else "decreasing"

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.c * expit(self.a * (x - self.b)) + self.d

    def to_dict(self) -> dict:
        return {"family": "sigmoid", "a": self.a, "b": self.b, "c": self.c, "d": self.d}


@dataclass(frozen=True)
class StepFunctionSpec:
    """Piecewise-constant replacement: right-closed pieces between breakpoints."""

    breakpoints: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        lvls = tuple(float(v) for v in self.levels)
        if len(lvls) != len(bps) + 1:
            raise ValueError("need exactly one level per piece: |levels| = |breakpoints| + 1")
        if any(not np.isfinite(v) for v in bps + lvls):
            raise ValueError("breakpoints and levels must be finite")
        if list(bps) != sorted(set(bps)):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "levels", lvls)

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(np.asarray(self.breakpoints), x, side="left")
        return np.asarray(self.levels)[idx]

    def to_dict(self) -> dict:
        return {
            "family": "step",
            "breakpoints": list(self.breakpoints),
            "levels": list(self.levels),
        }


def replacement_from_dict(doc: dict):
    family = doc.get("family")
    if family == "sigmoid":
        return SigmoidParams(a=doc["a"], b=doc["b"], c=doc["c"], d=doc["d"])
    if family == "step":
        return StepFunctionSpec(tuple(doc["breakpoints"]), tuple(doc["levels"]))
    raise ValueError(f"unknown replacement family: {family!r}")


# -- curve sampling and trusted regions -----------------------------------------


def sample_curve(model: EbmModel, feature: str, n: int = 100) -> np.ndarray:
    """n evenly spaced (x, score) samples over the feature's training range."""
    if n < 2:
        raise ValueError("need at least 2 sample points")
    term = model.term_for(feature)
    lo, hi = term.train_range
    xs = np.linspace(lo, hi, n)
    return np.column_stack([xs, term.contributions(xs)])


@dataclass(frozen=True)
class TrustRegion:
    """Sampled curve with analyst-excluded intervals masked out."""

    feature: str
    points: np.ndarray
    excluded: tuple[tuple[float, float], ...]
    selected_mask: np.ndarray

    @property
    def selected_x(self) -> np.ndarray:
        return self.points[self.selected_mask, 0]

    @property
    def selected_y(self) -> np.ndarray:
        return self.points[self.selected_mask, 1]


def select_trusted(
    feature: str, points: np.ndarray, excluded=()
) -> TrustRegion:
    """Drop samples inside any excluded [lo, hi) interval; need >= 4 survivors."""
    points = np.asarray(points, dtype=float)
    intervals = []
    for lo, hi in excluded:
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise ValueError(f"invalid excluded interval [{lo}, {hi})")
        intervals.append((lo, hi))
    xs = points[:, 0]
    mask = np.ones(xs.size, dtype=bool)
    for lo, hi in intervals:
        mask &= ~((xs >= lo) & (xs < hi))
    if int(mask.sum()) < 4:
        raise ValueError(
            f"{feature}: only {int(mask.sum())} trusted points left; need at least 4"
        )
    return TrustRegion(feature, points, tuple(intervals), mask)


# -- sigmoid fitting --------------------------------------------------------------


def _sigmoid_sse(theta: np.ndarray, sign: float, xs: np.ndarray, ys: np.ndarray) -> float:
    a = np.exp(theta[0])
    c = sign * np.exp(theta[2])
    r = c * expit(a * (xs - theta[1])) + theta[3] - ys
    return float(np.dot(r, r))


def fit_sigmoid(xs, ys, direction: str = "free") -> tuple[SigmoidParams, float]:
    """Least-squares sigmoid fit via multi-start Nelder-Mead.

    The steepness is parameterized as exp(.) > 0 and the amplitude sign is
    fixed per start, so a directional constraint holds exactly by
    construction. Sixteen starts cover a sign/scale grid for the steepness and
    amplitude with midpoints at data quantiles.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 4:
        raise ValueError(f"need at least 4 points to fit a sigmoid, got {xs.size}")
    span = float(xs.max() - xs.min())
    if span <= 0:
        raise ValueError("sample x values must not all be equal")
    if direction not in ("increasing", "decreasing", "free"):
        raise ValueError(f"unknown direction: {direction!r}")

    y_range = float(ys.max() - ys.min())
    y_mean = float(ys.mean())
    c_mags = [y_range, y_range / 2] if y_range > 0 else [1.0, 0.5]
    a_scales = [2.0 / span, 10.0 / span]
    if direction == "free":
        signs = [1.0, -1.0]
        b_qs = [0.25, 0.75]
    else:
        signs = [1.0] if direction == "increasing" else [-1.0]
        b_qs = [0.2, 0.4, 0.6, 0.8]
    b_starts = [float(np.quantile(xs, q)) for q in b_qs]

    options = {"xatol": 1e-10, "fatol": 1e-14, "maxiter": 6000, "maxfev": 12000}
    best = None
    for sign in signs:
        for a0 in a_scales:
            for c0 in c_mags:
                for b0 in b_starts:
                    theta0 = np.array(
                        [np.log(a0), b0, np.log(max(c0, 1e-8)), y_mean - sign * c0 / 2.0]
                    )
                    res = minimize(
                        _sigmoid_sse,
                        theta0,
                        args=(sign, xs, ys),
                        method="Nelder-Mead",
                        options=options,
                    )
                    if best is None or res.fun < best[0]:
                        best = (float(res.fun), res.x.copy(), sign)
    sse, theta, sign = best
    res = minimize(
        _sigmoid_sse, theta, args=(sign, xs, ys), method="Nelder-Mead", options=options
    )
    if res.fun < sse:
        sse, theta = float(res.fun), res.x
    if not np.all(np.isfinite(theta)) or not np.isfinite(sse):
        raise ArithmeticError("sigmoid fit produced a non-finite result")
    params = SigmoidParams(
        a=float(np.exp(theta[0])),
        b=float(theta[1]),
        c=float(sign * np.exp(theta[2])),
        d=float(theta[3]),
    )
    return params, sse


# -- univariate surgery ------------------------------------------------------------


def _recentered(term: UnivariateTerm, new_scores: np.ndarray) -> tuple[UnivariateTerm, float]:
    total = float(term.train_weight.sum())
    if total <= 0:
        raise ValueError(f"{term.feature}: zero total train_weight")
    mu = float(np.dot(term.train_weight, new_scores) / total)
    return replace(term, scores=new_scores - mu), mu


def _with_edit(model: EbmModel, entry: dict, **changes) -> EbmModel:
    return replace(
        model,
        provenance=PROVENANCE_EDITED,
        edit_log=model.edit_log + (entry,),
        **changes,
    )


def apply_univariate_edit(
    model: EbmModel, feature: str, replacement, log_entry: dict | None = None
) -> EbmModel:
    """Replace one feature's per-bin scores with the replacement curve.

    The curve is evaluated at bin centers (outer bins at the adjacent finite
    cut), the new table is re-centered against the stored training weights,
    and the mean shift moves into the intercept so predictions change only
    through the intended shape change.
    """
    term = model.term_for(feature)
    new_scores = np.asarray(replacement.predict(term.edges.centers()), dtype=float)
    if not np.all(np.isfinite(new_scores)):
        raise ValueError(f"{feature}: replacement produced non-finite scores")
    new_term, mu = _recentered(term, new_scores)
    univariate = tuple(new_term if t.feature == feature else t for t in model.univariate)
    if log_entry is None:
        log_entry = {
            "kind": "univariate",
            "feature": feature,
            "replacement": replacement.to_dict(),
            "intercept_shift": mu,
        }
    return _with_edit(
        model, log_entry, intercept=model.intercept + mu, univariate=univariate
    )


def edited_features(model: EbmModel) -> set[str]:
    return {e["feature"] for e in model.edit_log if e.get("kind") == "univariate"}


# -- interaction synthesis and replacement -------------------------------------------


def synthesize_interaction(model: EbmModel, pair) -> np.ndarray:
    """Additive synthesis on the original bin grid: cell = f'_x(center) + f'_y(center).

    Both features must already carry a univariate edit; the synthesized matrix
    inherits their monotone trends.
    """
    term = model.interaction_for(pair)
    fx, fy = term.features
    done = edited_features(model)
    missing = [f for f in (fx, fy) if f not in done]
    if missing:
        raise ValueError(f"synthesis requires edited univariate curves; missing: {missing}")
    fx_scores = model.term_for(fx).contributions(term.edges_x.centers())
    fy_scores = model.term_for(fy).contributions(term.edges_y.centers())
    return fx_scores[:, None] + fy_scores[None, :]


def rescale_to_range(synth: np.ndarray, target_min: float, target_max: float) -> np.ndarray:
    """Affine map sending [synth min, synth max] onto [target_min, target_max]."""
    synth = np.asarray(synth, dtype=float)
    smin, smax = float(synth.min()), float(synth.max())
    if smax <= smin:
        raise ValueError(
            "synthesized matrix is constant; fill with the target midpoint "
            f"{(target_min + target_max) / 2} instead of rescaling"
        )
    if target_max < target_min:
        raise ValueError("target_max must be >= target_min")
    return target_min + (synth - smin) * (target_max - target_min) / (smax - smin)


def discrepancy(original: np.ndarray, synth_rescaled: np.ndarray, metric: str) -> np.ndarray:
    """Cell-wise discrepancy: 'relative' normalizes by the original cell,
    'range' by the original matrix's score range.

    Relative cells with a zero denominator are +inf when the numerator is
    nonzero (always replaced at any finite threshold) and 0 otherwise.
    """
    original = np.asarray(original, dtype=float)
    synth_rescaled = np.asarray(synth_rescaled, dtype=float)
    if original.shape != synth_rescaled.shape:
        raise ValueError("matrix shapes must match")
    diff = np.abs(synth_rescaled - original)
    if metric == "relative":
        denom = np.abs(original)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(denom > 0, diff / np.where(denom > 0, denom, 1.0),
                            np.where(diff > 0, np.inf, 0.0))
    if metric == "range":
        spread = float(original.max() - original.min())
        if spread <= 0:
            raise ValueError("range metric undefined: original matrix is constant")
        return diff / spread
    raise ValueError(f"unknown metric: {metric!r}")


@dataclass(frozen=True)
class ReplacementPolicy:
    pair: tuple[str, str]
    metric: str = "range"
    epsilon: float = 0.40

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        object.__setattr__(self, "pair", (str(self.pair[0]), str(self.pair[1])))


@dataclass(frozen=True)
class EditReport:
    """Before/after record of one selective interaction replacement."""

    pair: tuple[str, str]
    metric: str
    epsilon: float
    mask: np.ndarray
    replaced_fraction: float
    before: np.ndarray
    after: np.ndarray
    delta: np.ndarray
    intercept_shift: float = 0.0

    def to_dict(self) -> dict:
        delta = np.where(np.isfinite(self.delta), self.delta, None)
        return {
            "pair": list(self.pair),
            "metric": self.metric,
            "epsilon": self.epsilon,
            "mask": self.mask.astype(int).tolist(),
            "replaced_fraction": self.replaced_fraction,
            "before": self.before.tolist(),
            "after": self.after.tolist(),
            "delta": delta.tolist(),
            "intercept_shift": self.intercept_shift,
        }


def selective_replace(
    original: np.ndarray, synth_rescaled: np.ndarray, policy: ReplacementPolicy
) -> tuple[np.ndarray, EditReport]:
    """Cell-wise substitution wherever the discrepancy exceeds the threshold."""
    delta = discrepancy(original, synth_rescaled, policy.metric)
    mask = delta > policy.epsilon
    out = np.where(mask, synth_rescaled, original)
    report = EditReport(
        pair=policy.pair,
        metric=policy.metric,
        epsilon=policy.epsilon,
        mask=mask,
        replaced_fraction=float(mask.mean()),
        before=np.array(original, copy=True),
        after=out,
        delta=delta,
    )
    return out, report


def apply_interaction_edit(
    model: EbmModel, pair, metric: str = "range", epsilon: float = 0.40,
    log_entry: dict | None = None,
) -> tuple[EbmModel, EditReport]:
    """Synthesize, rescale to the original range, selectively replace, re-center."""
    term = model.interaction_for(pair)
    synth = synthesize_interaction(model, pair)
    rescaled = rescale_to_range(synth, float(term.matrix.min()), float(term.matrix.max()))
    policy = ReplacementPolicy(pair=term.features, metric=metric, epsilon=epsilon)
    new_matrix, report = selective_replace(term.matrix, rescaled, policy)

    total = float(term.train_weight.sum())
    if total <= 0:
        raise ValueError(f"{term.name}: zero total train_weight")
    mu = float((term.train_weight * new_matrix).sum() / total)
    new_term = replace(term, matrix=new_matrix - mu)
    interactions = tuple(new_term if t.features == term.features else t for t in model.interactions)
    report = replace(report, intercept_shift=mu)
    if log_entry is None:
        log_entry = {
            "kind": "interaction",
            "pair": list(term.features),
            "metric": metric,
            "epsilon": epsilon,
            "replaced_fraction": report.replaced_fraction,
            "mask": report.mask.astype(int).tolist(),
            "intercept_shift": mu,
        }
    model = _with_edit(
        model, log_entry, intercept=model.intercept + mu, interactions=interactions
    )
    return model, report


# -- edit spec bundles ------------------------------------------------------------


@dataclass(frozen=True)
class UnivariateEdit:
    """Declarative univariate edit: curve family plus trusted-region exclusions."""

    feature: str
    family: str
    direction: str = "free"
    excluded: tuple[tuple[float, float], ...] = ()
    breakpoints: tuple[float, ...] = ()
    levels: tuple[float, ...] = ()
    n_samples: int = 100

    def __post_init__(self):
        if self.family not in ("sigmoid", "step"):
            raise ValueError(f"unknown curve family: {self.family!r}")
        if self.family == "step" and not self.levels:
            raise ValueError(f"{self.feature}: step edit needs breakpoints and levels")
        object.__setattr__(self, "excluded", tuple((float(a), float(b)) for a, b in self.excluded))
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))

    def to_dict(self) -> dict:
        doc: dict = {"feature": self.feature, "family": self.family}
        if self.family == "sigmoid":
            doc["direction"] = self.direction
            doc["excluded"] = [list(iv) for iv in self.excluded]
            doc["n_samples"] = self.n_samples
        else:
            doc["breakpoints"] = list(self.breakpoints)
            doc["levels"] = list(self.levels)
        return doc


@dataclass(frozen=True)
class InteractionEdit:
    pair: tuple[str, str]
    metric: str = "range"
    epsilon: float = 0.40

    def __post_init__(self):
        object.__setattr__(self, "pair", (str(self.pair[0]), str(self.pair[1])))
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if not float(self.epsilon) >= 0:
            raise ValueError("epsilon must be >= 0")

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "metric": self.metric, "epsilon": self.epsilon}


@dataclass(frozen=True)
class EditSpecBundle:
    univariate: tuple[UnivariateEdit, ...] = ()
    interactions: tuple[InteractionEdit, ...] = ()

    def to_dict(self) -> dict:
        return {
            "univariate": [u.to_dict() for u in self.univariate],
            "interactions": [i.to_dict() for i in self.interactions],
        }


def parse_edit_spec(doc: dict) -> EditSpecBundle:
    univariate = tuple(
        UnivariateEdit(
            feature=u["feature"],
            family=u["family"],
            direction=u.get("direction", "free"),
            excluded=tuple((a, b) for a, b in u.get("excluded", [])),
            breakpoints=tuple(u.get("breakpoints", [])),
            levels=tuple(u.get("levels", [])),
            n_samples=int(u.get("n_samples", 100)),
        )
        for u in doc.get("univariate", [])
    )
    interactions = tuple(
        InteractionEdit(
            pair=(p["pair"][0], p["pair"][1]),
            metric=p.get("metric", "range"),
            epsilon=float(p.get("epsilon", 0.40)),
        )
        for p in doc.get("interactions", [])
    )
    return EditSpecBundle(univariate=univariate, interactions=interactions)


def load_edit_spec(path) -> EditSpecBundle:
    return parse_edit_spec(json.loads(Path(path).read_text(encoding="utf-8")))


def save_edit_spec(bundle: EditSpecBundle, path) -> None:
    Path(path).write_text(json.dumps(bundle.to_dict(), indent=2), encoding="utf-8")


def default_edit_spec() -> EditSpecBundle:
    """The shipped default edits: GWD/PGA monotone sigmoids, L step function,
    and range-metric selective replacement for their three interactions."""
    raw = resources.files("glassboost").joinpath("specs/default_edits.json").read_text("utf-8")
    return parse_edit_spec(json.loads(raw))


def fit_univariate_replacement(model: EbmModel, spec: UnivariateEdit):
    """Resolve a declarative univariate edit into a concrete replacement curve."""
    if spec.family == "step":
        return StepFunctionSpec(spec.breakpoints, spec.levels), None
    points = sample_curve(model, spec.feature, spec.n_samples)
    region = select_trusted(spec.feature, points, spec.excluded)
    params, sse = fit_sigmoid(region.selected_x, region.selected_y, spec.direction)
    return params, sse


def apply_domain_edits(
    model: EbmModel, bundle: EditSpecBundle
) -> tuple[EbmModel, list[EditReport]]:
    """Apply a full edit bundle: univariate replacements first, then selective
    interaction replacements. Deterministic given model and bundle."""
    for spec in bundle.univariate:
        replacement, sse = fit_univariate_replacement(model, spec)
        entry = {
            "kind": "univariate",
            "feature": spec.feature,
            "spec": spec.to_dict(),
            "replacement": replacement.to_dict(),
        }
        if sse is not None:
            entry["fit_sse"] = sse
        model = apply_univariate_edit(model, spec.feature, replacement, log_entry=None)
        # Re-tag the automatically written entry with the declarative spec.
        entry["intercept_shift"] = model.edit_log[-1]["intercept_shift"]
        model = replace(model, edit_log=model.edit_log[:-1] + (entry,))

    reports: list[EditReport] = []
    for spec in bundle.interactions:
        model, report = apply_interaction_edit(
            model, spec.pair, metric=spec.metric, epsilon=spec.epsilon
        )
        reports.append(report)
    return model, reports


def replay_edit_log(base_model: EbmModel, edit_log) -> EbmModel:
    """Re-apply a recorded edit log verbatim; reproduces the edited model exactly.

    Univariate entries re-apply the stored fitted replacement (no refitting);
    interaction entries re-run the deterministic synthesis and replacement.
    """
    model = base_model
    for entry in edit_log:
        kind = entry.get("kind")
        if kind == "univariate":
            replacement = replacement_from_dict(entry["replacement"])
            model = apply_univariate_edit(
                model, entry["feature"], replacement, log_entry=dict(entry)
            )
        elif kind == "interaction":
            model, _ = apply_interaction_edit(
                model,
                tuple(entry["pair"]),
                metric=entry["metric"],
                epsilon=entry["epsilon"],
                log_entry=dict(entry),
            )
        else:
            raise ValueError(f"unknown edit log entry kind: {kind!r}")
    return model
