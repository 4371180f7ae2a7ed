"""Lateral-spreading feature table: ingestion, summaries, splits, synthetic data.

The canonical feature set is groundwater depth (GWD, m), peak ground
acceleration (PGA, g), distance to the nearest river (L, km), slope angle
(deg), and elevation (m). Labels are binary: 1 = lateral spreading observed
(displacement at or above 0.3 m), 0 = none.
"""

from __future__ import annotations

import csv
import math
from functools import lru_cache
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

FEATURES: tuple[str, ...] = ("GWD", "PGA", "L", "slope", "elevation")

UNITS: dict[str, str] = {
    "GWD": "m",
    "PGA": "g",
    "L": "km",
    "slope": "deg",
    "elevation": "m",
}

SPLITS: tuple[str, ...] = ("train", "validation", "test")

#: Default CSV header names for each canonical column.
DEFAULT_COLUMNS: dict[str, str] = {
    "site_id": "site_id",
    "GWD": "gwd_m",
    "PGA": "pga_g",
    "L": "l_km",
    "slope": "slope_deg",
    "elevation": "elevation_m",
    "label": "label",
    "displacement": "displacement_m",
}

#: Displacements at or above this many meters are labeled positive.
DISPLACEMENT_THRESHOLD_M = 0.3


class IngestError(ValueError):
    """CSV ingestion failure; carries per-row error details when applicable."""

    def __init__(self, message: str, row_errors: list[tuple[int, str, str]] | None = None):
        super().__init__(message)
        self.row_errors = row_errors or []


def label_from_displacement(displacement: float) -> int:
    """Binarize a horizontal displacement: >= 0.3 m counts as lateral spreading."""
    d = float(displacement)
    if not math.isfinite(d) or d < 0:
        raise ValueError(f"displacement must be finite and non-negative, got {displacement}")
    return int(d >= DISPLACEMENT_THRESHOLD_M)


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled feature table with optional split assignments."""

    site_ids: np.ndarray
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = FEATURES
    split: dict[int, str] = field(default_factory=dict)
    generator: "SyntheticSpec | None" = None

    def __post_init__(self):
        site_ids = np.asarray(self.site_ids, dtype=np.int64)
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=np.int8)
        n = site_ids.size
        if X.shape != (n, len(self.feature_names)):
            raise ValueError("X must be (n_rows, n_features)")
        if y.shape != (n,):
            raise ValueError("y must align with rows")
        if not np.all(np.isfinite(X)):
            raise ValueError("feature values must be finite")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        if np.unique(site_ids).size != n:
            raise ValueError("site_ids must be unique")
        for arr in (site_ids, X, y):
            arr.flags.writeable = False
        object.__setattr__(self, "site_ids", site_ids)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        unknown = set(self.split) - set(site_ids.tolist())
        if unknown:
            raise ValueError(f"split references unknown site_ids: {sorted(unknown)[:5]}")
        bad = {v for v in self.split.values() if v not in SPLITS}
        if bad:
            raise ValueError(f"unknown split names: {sorted(bad)}")

    @property
    def n(self) -> int:
        return int(self.site_ids.size)

    def feature_index(self, feature: str) -> int:
        try:
            return self.feature_names.index(feature)
        except ValueError:
            raise KeyError(f"unknown feature: {feature}") from None

    def column(self, feature: str) -> np.ndarray:
        return self.X[:, self.feature_index(feature)]

    def row_index(self, site_id: int) -> int:
        idx = np.flatnonzero(self.site_ids == site_id)
        if idx.size == 0:
            raise KeyError(f"unknown site_id: {site_id}")
        return int(idx[0])

    def features_of(self, site_id: int) -> dict[str, float]:
        row = self.X[self.row_index(site_id)]
        return {f: float(v) for f, v in zip(self.feature_names, row)}

    def split_mask(self, name: str) -> np.ndarray:
        if name not in SPLITS:
            raise ValueError(f"unknown split: {name}")
        return np.array([self.split.get(int(s)) == name for s in self.site_ids])

    def subset(self, name: str) -> "Dataset":
        mask = self.split_mask(name)
        ids = self.site_ids[mask]
        return Dataset(
            site_ids=ids,
            X=self.X[mask],
            y=self.y[mask],
            feature_names=self.feature_names,
            split={int(s): name for s in ids},
            generator=self.generator,
        )


@dataclass(frozen=True)
class FeatureSummary:
    """Quartile/IQR summary with Tukey fences and outlier count."""

    feature: str
    q1: float
    q3: float
    iqr: float
    lower_fence: float
    upper_fence: float
    outlier_count: int
    min: float
    max: float

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "q1": self.q1,
            "q3": self.q3,
            "iqr": self.iqr,
            "lower_fence": self.lower_fence,
            "upper_fence": self.upper_fence,
            "outlier_count": self.outlier_count,
            "min": self.min,
            "max": self.max,
        }


def summarize_feature(ds: Dataset, feature: str) -> FeatureSummary:
    """IQR summary of one feature; quartiles use linear interpolation."""
    values = ds.column(feature)
    if values.size < 4:
        raise ValueError(f"need at least 4 rows to summarize, got {values.size}")
    q1, q3 = np.quantile(values, [0.25, 0.75])
    iqr = q3 - q1
    lower = q1 - 1.5 * iqr
    upper = q3 + 1.5 * iqr
    outliers = int(np.count_nonzero((values < lower) | (values > upper)))
    return FeatureSummary(
        feature=feature,
        q1=float(q1),
        q3=float(q3),
        iqr=float(iqr),
        lower_fence=float(lower),
        upper_fence=float(upper),
        outlier_count=outliers,
        min=float(values.min()),
        max=float(values.max()),
    )


# -- CSV ingestion -------------------------------------------------------------


def load_dataset(path, columns: dict[str, str] | None = None) -> Dataset:
    """Load a labeled feature CSV.

    ``columns`` maps canonical names (site_id, GWD, PGA, L, slope, elevation,
    and either label or displacement) to CSV header names; unspecified entries
    fall back to the defaults. Rows with unparseable cells are collected into a
    row-indexed error list and the whole load is rejected.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    mapping = dict(DEFAULT_COLUMNS)
    if columns:
        mapping.update(columns)

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("no rows") from None
        header = [h.strip() for h in header]
        col_pos = {name: header.index(name) for name in header}

        def pos_of(canonical: str, required: bool) -> int | None:
            name = mapping[canonical]
            if name in col_pos:
                return col_pos[name]
            if required:
                raise IngestError(f"missing column: {name!r} (for {canonical})")
            return None

        positions = {c: pos_of(c, required=True) for c in ("site_id", *FEATURES)}
        label_pos = pos_of("label", required=False)
        disp_pos = pos_of("displacement", required=False)
        if columns and "label" in columns and "displacement" in columns:
            raise IngestError("map either a label column or a displacement column, not both")
        if label_pos is not None and disp_pos is not None:
            # Both headers present: an explicit mapping picks the winner.
            if columns and "displacement" in columns:
                label_pos = None
            else:
                disp_pos = None
        if label_pos is None and disp_pos is None:
            raise IngestError(
                f"missing column: need {mapping['label']!r} or {mapping['displacement']!r}"
            )
        split_pos = col_pos.get("split")

        site_ids: list[int] = []
        rows: list[list[float]] = []
        labels: list[int] = []
        split: dict[int, str] = {}
        errors: list[tuple[int, str, str]] = []
        for row_idx, raw in enumerate(reader):
            if not raw or all(not c.strip() for c in raw):
                continue
            row_ok = True

            def cell(pos: int, colname: str) -> float:
                nonlocal row_ok
                try:
                    v = float(raw[pos])
                except (ValueError, IndexError):
                    errors.append((row_idx, colname, f"non-numeric cell {raw[pos] if pos < len(raw) else ''!r}"))
                    row_ok = False
                    return math.nan
                if not math.isfinite(v):
                    errors.append((row_idx, colname, f"non-finite cell {v!r}"))
                    row_ok = False
                return v

            sid = cell(positions["site_id"], mapping["site_id"])
            feats = [cell(positions[f], mapping[f]) for f in FEATURES]
            if label_pos is not None:
                lab = cell(label_pos, mapping["label"])
                if row_ok and lab not in (0.0, 1.0):
                    errors.append((row_idx, mapping["label"], f"label must be 0 or 1, got {lab}"))
                    row_ok = False
            else:
                disp = cell(disp_pos, mapping["displacement"])
                if row_ok:
                    try:
                        lab = label_from_displacement(disp)
                    except ValueError as exc:
                        errors.append((row_idx, mapping["displacement"], str(exc)))
                        row_ok = False
            if not row_ok:
                continue
            site_ids.append(int(sid))
            rows.append(feats)
            labels.append(int(lab))
            if split_pos is not None and raw[split_pos].strip():
                split[int(sid)] = raw[split_pos].strip()

    if errors:
        preview = "; ".join(f"row {r} col {c}: {m}" for r, c, m in errors[:5])
        raise IngestError(f"{len(errors)} bad cell(s): {preview}", row_errors=errors)
    if not rows:
        raise IngestError("no rows")
    return Dataset(
        site_ids=np.array(site_ids, dtype=np.int64),
        X=np.array(rows, dtype=float),
        y=np.array(labels, dtype=np.int8),
        split=split,
    )


def write_dataset(ds: Dataset, path) -> None:
    """Write a dataset CSV that round-trips rows, labels, and split exactly."""
    path = Path(path)
    fields = [DEFAULT_COLUMNS["site_id"], *(DEFAULT_COLUMNS[f] for f in ds.feature_names),
              DEFAULT_COLUMNS["label"]]
    has_split = bool(ds.split)
    if has_split:
        fields.append("split")
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for i in range(ds.n):
            sid = int(ds.site_ids[i])
            row = [sid, *(repr(float(v)) for v in ds.X[i]), int(ds.y[i])]
            if has_split:
                row.append(ds.split.get(sid, ""))
            writer.writerow(row)


# -- splitting -------------------------------------------------------------------


def split_dataset(
    ds: Dataset,
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 0,
    stratify: bool = False,
) -> Dataset:
    """Assign train/validation/test splits by seeded shuffle.

    Boundaries sit at the rounded cumulative fractions of the shuffled order,
    so each split size is within one row of its exact share. With
    ``stratify=True`` the same rule is applied inside each label class.
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be three positive fractions, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")

    rng = np.random.default_rng(seed)

    def assign(indices: np.ndarray, out: dict[int, str]) -> None:
        order = indices[rng.permutation(indices.size)]
        n = order.size
        b1 = int(math.floor(ratios[0] * n + 0.5))
        b2 = int(math.floor((ratios[0] + ratios[1]) * n + 0.5))
        for i in order[:b1]:
            out[int(ds.site_ids[i])] = "train"
        for i in order[b1:b2]:
            out[int(ds.site_ids[i])] = "validation"
        for i in order[b2:]:
            out[int(ds.site_ids[i])] = "test"

    split: dict[int, str] = {}
    if stratify:
        for cls in (0, 1):
            assign(np.flatnonzero(ds.y == cls), split)
    else:
        assign(np.arange(ds.n), split)
    return replace(ds, split=split)


# -- synthetic data ---------------------------------------------------------------


@dataclass(frozen=True)
class Patch:
    """Additive logit delta applied where every (feature, lo, hi) bound holds.

    Bounds are half-open: lo <= x < hi.
    """

    bounds: tuple[tuple[str, float, float], ...]
    delta: float

    def to_dict(self) -> dict:
        return {"bounds": [list(b) for b in self.bounds], "delta": self.delta}


@dataclass(frozen=True)
class SyntheticSpec:
    """Ground-truth recipe for synthetic lateral-spreading data.

    Features are drawn as ``lo + (hi - lo) * Beta(a, b)``; an optional latent
    terrain factor correlates coupled features (river valleys have low L,
    shallow GWD, and low elevation together). The true logit is an intercept
    plus linear effects on unit-scaled features, centered pairwise products,
    box patches, and latent Gaussian noise.
    """

    ranges: tuple[tuple[str, float, float], ...] = (
        ("GWD", 0.0, 4.0),
        ("PGA", 0.2, 0.6),
        ("L", 0.0, 2.4),
        ("slope", 0.0, 12.0),
        ("elevation", 0.0, 9.0),
    )
    shapes: tuple[tuple[str, float, float], ...] = ()
    intercept: float = -0.3
    linear: tuple[tuple[str, float], ...] = (("PGA", 2.0), ("GWD", -1.5), ("L", -1.5))
    products: tuple[tuple[str, str, float], ...] = ()
    patches: tuple[Patch, ...] = ()
    noise_sd: float = 0.0
    couplings: tuple[tuple[str, float], ...] = ()
    pinned_sites: tuple[tuple[int, tuple[tuple[str, float], ...]], ...] = ()

    def range_of(self, feature: str) -> tuple[float, float]:
        for name, lo, hi in self.ranges:
            if name == feature:
                return (lo, hi)
        raise KeyError(f"unknown feature: {feature}")

    def scaled(self, feature: str, values: np.ndarray) -> np.ndarray:
        lo, hi = self.range_of(feature)
        return (np.asarray(values, dtype=float) - lo) / (hi - lo)

    def true_logit(self, X: np.ndarray, feature_names=FEATURES) -> np.ndarray:
        """Noise-free logit of the positive class for rows in feature order."""
        X = np.asarray(X, dtype=float)
        col = {f: i for i, f in enumerate(feature_names)}
        z = {f: self.scaled(f, X[:, col[f]]) for f in feature_names}
        s = np.full(X.shape[0], float(self.intercept))
        for f, w in self.linear:
            s += w * z[f]
        for f1, f2, w in self.products:
            s += w * (z[f1] - 0.5) * (z[f2] - 0.5)
        for patch in self.patches:
            mask = np.ones(X.shape[0], dtype=bool)
            for f, lo, hi in patch.bounds:
                v = X[:, col[f]]
                mask &= (v >= lo) & (v < hi)
            s += patch.delta * mask
        return s

    def to_dict(self) -> dict:
        return {
            "ranges": [list(r) for r in self.ranges],
            "shapes": [list(s) for s in self.shapes],
            "intercept": self.intercept,
            "linear": [list(t) for t in self.linear],
            "products": [list(p) for p in self.products],
            "patches": [p.to_dict() for p in self.patches],
            "noise_sd": self.noise_sd,
            "couplings": [list(c) for c in self.couplings],
            "pinned_sites": [[sid, [list(kv) for kv in feats]] for sid, feats in self.pinned_sites],
        }


def generate_synthetic(spec: SyntheticSpec, n: int, seed: int) -> Dataset:
    """Draw a synthetic dataset from the recorded ground truth; deterministic per seed."""
    if n < 10:
        raise ValueError(f"need n >= 10, got {n}")
    rng = np.random.default_rng(seed)
    shape = {f: (a, b) for f, a, b in spec.shapes}
    coupling = {f: float(w) for f, w in spec.couplings}
    terrain_z = rng.standard_normal(n) if coupling else None
    cols = []
    for name, lo, hi in spec.ranges:
        a, b = shape.get(name, (1.0, 1.0))
        w = coupling.get(name, 0.0)
        if w != 0.0:
            # Gaussian copula against the shared terrain factor; marginals exact
            from scipy.special import ndtr
            from scipy.stats import beta as beta_dist

            z = w * terrain_z + math.sqrt(1.0 - w * w) * rng.standard_normal(n)
            u = ndtr(z)
            if (a, b) != (1.0, 1.0):
                u = beta_dist.ppf(u, a, b)
        else:
            u = rng.beta(a, b, size=n) if (a, b) != (1.0, 1.0) else rng.random(n)
        cols.append(lo + (hi - lo) * u)
    X = np.column_stack(cols)
    feature_names = tuple(name for name, _, _ in spec.ranges)
    for sid, feats in spec.pinned_sites:
        if 0 <= sid < n:
            for f, v in feats:
                X[sid, feature_names.index(f)] = v
    logit = spec.true_logit(X, feature_names)
    if spec.noise_sd > 0:
        logit = logit + spec.noise_sd * rng.standard_normal(n)
    p = 1.0 / (1.0 + np.exp(-logit))
    y = (rng.random(n) < p).astype(np.int8)
    return Dataset(
        site_ids=np.arange(n, dtype=np.int64),
        X=X,
        y=y,
        feature_names=feature_names,
        generator=spec,
    )


def _surrogate_build(
    ranges,
    shapes,
    intercept,
    linear,
    univariate_patches,
    interaction_blocks,
    noise_sd,
    pinned_sites,
    couplings=(),
    products=(),
    extra_patches=(),
) -> SyntheticSpec:
    """Compose a surrogate spec whose interaction blocks are doubly centered.

    Each 2-D block leaks a marginal effect into both of its features; without
    correction those leaks distort the learned univariate curves. For every
    block, compensating univariate patches subtract the block's conditional
    mean on each axis (estimated on a fixed Monte-Carlo feature draw, so the
    correction stays valid under coupled features), keeping the planted
    univariate shapes intact and landing the block in the interaction term.
    """
    base = SyntheticSpec(
        ranges=ranges,
        shapes=shapes,
        intercept=0.0,
        linear=(),
        products=(),
        patches=(),
        noise_sd=0.0,
        couplings=couplings,
    )
    mc = generate_synthetic(base, 120_000, seed=20_260_301)

    def window_mask(bound) -> np.ndarray:
        f, lo, hi = bound
        v = mc.column(f)
        return (v >= lo) & (v < hi)

    patches = [Patch((bound,), delta) for bound, delta in univariate_patches]
    patches.extend(extra_patches)
    for (bound_a, bound_b), delta in interaction_blocks:
        patches.append(Patch((bound_a, bound_b), delta))
        in_a = window_mask(bound_a)
        in_b = window_mask(bound_b)
        patches.append(Patch((bound_a,), -delta * float(in_b[in_a].mean())))
        patches.append(Patch((bound_b,), -delta * float(in_a[in_b].mean())))

    return SyntheticSpec(
        ranges=ranges,
        shapes=shapes,
        intercept=intercept,
        linear=linear,
        products=tuple(products),
        patches=tuple(patches),
        noise_sd=noise_sd,
        couplings=couplings,
        pinned_sites=pinned_sites,
    )


@lru_cache(maxsize=1)
def christchurch_surrogate() -> SyntheticSpec:
    """Surrogate recipe mimicking the 2011 Christchurch lateral-spreading table.

    Marginals, class balance, and sparse-corner label biases are tuned so a
    model trained on this data exhibits the same headline metrics, non-physical
    shape-function artifacts, and editing behavior as on the real dataset.
    Site 2639 is pinned to the canonical near-river, high-shaking profile used
    in local-explanation walkthroughs.
    """
    return _surrogate_build(
        ranges=(
            ("GWD", 0.4, 4.5),
            ("PGA", 0.18, 0.56),
            ("L", 0.005, 2.4),
            ("slope", 0.0, 14.0),
            ("elevation", 0.2, 9.0),
        ),
        shapes=(
            ("GWD", 3.0, 4.0),
            ("slope", 1.3, 5.0),
            ("L", 0.85, 1.5),
        ),
        intercept=4.0,
        linear=(
            ("GWD", -4.8),
            ("PGA", 2.2),
                        ("slope", 0.3),
            ("elevation", -3.0),
        ),
        univariate_patches=(
            # GWD: sparse shallow sites almost never spread (data artifact),
            # plus a mild mid-depth bump
            (("GWD", 0.0, 0.7), -13.5),
            (("GWD", 0.7, 1.0), 0.2),
            (("GWD", 1.0, 1.5), 0.45),
            # PGA: strong-shaking sites suppressed by unmodeled soil factors
            (("PGA", 0.18, 0.26), -0.8),
            (("PGA", 0.26, 0.34), -0.35),
            (("PGA", 0.42, 0.51), 1.0),
            (("PGA", 0.51, 10.0), -4.6),
            # L: free-face threshold near the river, flat-ish decay beyond
            (("L", 0.0, 0.1), 5.5),
            (("L", 0.1, 0.3), 1.5),
            (("L", 0.3, 0.5), 0.55),
            (("L", 0.5, 99.0), -0.75),
            # elevation: low-lying ground spreads more
            (("elevation", 0.2, 1.3), 1.6),
        ),
        interaction_blocks=(
            # near-river synergy with shaking, overridden by the soil
            # suppressor at the strongest shaking levels
            ((("L", 0.0, 0.3), ("PGA", 0.36, 0.51)), 9.0),
            ((("L", 0.0, 0.3), ("PGA", 0.51, 10.0)), -3.4),
            # shallow water near the river amplifies spreading
            ((("GWD", 0.0, 1.2), ("L", 0.0, 0.3)), 2.4),
            # shallow water under strong shaking: suppressed in the data
            ((("GWD", 0.0, 1.5), ("PGA", 0.51, 10.0)), -9.0),
        ),
        extra_patches=(
            # far from the river under weak shaking, spreading essentially
            # never happens; raw so the suppression shapes the far-L and
            # low-PGA curves like the real table does
            Patch((("L", 0.49, 99.0), ("PGA", 0.18, 0.42)), -3.6),
            Patch((("GWD", 2.2, 4.5), ("PGA", 0.18, 0.42)), -2.2),
            # soil-response texture tiles over the GWD x PGA and L x PGA
            # surfaces; raw (uncompensated) so their axis trends blend into
            # the curves
            Patch((("L", 0.005, 0.2), ("PGA", 0.18, 0.3)), 0.40),
            Patch((("L", 0.005, 0.2), ("PGA", 0.3, 0.42)), -0.40),
            Patch((("L", 0.005, 0.2), ("PGA", 0.42, 0.51)), 0.40),
            Patch((("L", 0.005, 0.2), ("PGA", 0.51, 0.56)), -0.40),
            Patch((("L", 0.2, 0.6), ("PGA", 0.18, 0.3)), -0.45),
            Patch((("L", 0.2, 0.6), ("PGA", 0.3, 0.42)), 0.45),
            Patch((("L", 0.2, 0.6), ("PGA", 0.42, 0.51)), -0.45),
            Patch((("L", 0.2, 0.6), ("PGA", 0.51, 0.56)), 0.45),
            Patch((("L", 0.6, 1.3), ("PGA", 0.18, 0.3)), 0.50),
            Patch((("L", 0.6, 1.3), ("PGA", 0.3, 0.42)), -0.50),
            Patch((("L", 0.6, 1.3), ("PGA", 0.42, 0.51)), 0.50),
            Patch((("L", 0.6, 1.3), ("PGA", 0.51, 0.56)), -0.50),
            Patch((("L", 1.3, 2.4), ("PGA", 0.18, 0.3)), -0.40),
            Patch((("L", 1.3, 2.4), ("PGA", 0.3, 0.42)), 0.40),
            Patch((("L", 1.3, 2.4), ("PGA", 0.42, 0.51)), -0.40),
            Patch((("L", 1.3, 2.4), ("PGA", 0.51, 0.56)), 0.40),
            Patch((("GWD", 0.4, 1.0), ("PGA", 0.18, 0.3)), 0.45),
            Patch((("GWD", 0.4, 1.0), ("PGA", 0.3, 0.42)), -0.50),
            Patch((("GWD", 0.4, 1.0), ("PGA", 0.42, 0.51)), 0.55),
            Patch((("GWD", 0.4, 1.0), ("PGA", 0.51, 0.56)), -0.60),
            Patch((("GWD", 1.0, 1.8), ("PGA", 0.18, 0.3)), -0.60),
            Patch((("GWD", 1.0, 1.8), ("PGA", 0.3, 0.42)), 0.45),
            Patch((("GWD", 1.0, 1.8), ("PGA", 0.42, 0.51)), -0.50),
            Patch((("GWD", 1.0, 1.8), ("PGA", 0.51, 0.56)), 0.55),
            Patch((("GWD", 1.8, 2.8), ("PGA", 0.18, 0.3)), 0.55),
            Patch((("GWD", 1.8, 2.8), ("PGA", 0.3, 0.42)), -0.60),
            Patch((("GWD", 1.8, 2.8), ("PGA", 0.42, 0.51)), 0.45),
            Patch((("GWD", 1.8, 2.8), ("PGA", 0.51, 0.56)), -0.50),
            Patch((("GWD", 2.8, 4.5), ("PGA", 0.18, 0.3)), -0.50),
            Patch((("GWD", 2.8, 4.5), ("PGA", 0.3, 0.42)), 0.55),
            Patch((("GWD", 2.8, 4.5), ("PGA", 0.42, 0.51)), -0.60),
            Patch((("GWD", 2.8, 4.5), ("PGA", 0.51, 0.56)), 0.45),
        ),
        noise_sd=1.05,
        products=(
            # smooth damping of shaking response with water-table depth,
            # texturing the whole GWD x PGA surface
            ("GWD", "PGA", -2.5),
            # elevation amplifies or shields the shaking response; the strongest
            # single influence on the learned model
            ("PGA", "elevation", 13.0),
        ),
        couplings=(
            # shared terrain factor: river valleys have low L, shallow GWD,
            # and low elevation together
            ("L", 0.88),
            ("GWD", 0.72),
            ("PGA", -0.35),
            ("elevation", 0.88),
        ),
        pinned_sites=(
            (2639, (("L", 0.09), ("PGA", 0.52), ("GWD", 1.0), ("slope", 1.5), ("elevation", 1.0))),
        ),
    )


#: Row count of the real Christchurch table; the surrogate defaults to the same.
CHRISTCHURCH_N = 7291
