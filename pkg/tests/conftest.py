"""Shared fixtures: hand-built models, random model generators, trained toys."""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

import glassboost as gb
from glassboost.model import BinEdges, EbmModel, InteractionTerm, UnivariateTerm


def make_univariate(feature, cuts, scores, weights=None, train_range=None):
    cuts = np.asarray(cuts, dtype=float)
    scores = np.asarray(scores, dtype=float)
    if weights is None:
        weights = np.ones_like(scores)
    if train_range is None:
        lo = float(cuts.min()) - 1.0 if cuts.size else -1.0
        hi = float(cuts.max()) + 1.0 if cuts.size else 1.0
        train_range = (lo, hi)
    return UnivariateTerm(
        feature=feature,
        edges=BinEdges(feature, cuts),
        scores=scores,
        train_weight=np.asarray(weights, dtype=float),
        train_range=train_range,
    )


def make_interaction(pair, cuts_x, cuts_y, matrix, weights=None):
    matrix = np.asarray(matrix, dtype=float)
    if weights is None:
        weights = np.ones_like(matrix)
    return InteractionTerm(
        features=pair,
        edges_x=BinEdges(pair[0], np.asarray(cuts_x, dtype=float)),
        edges_y=BinEdges(pair[1], np.asarray(cuts_y, dtype=float)),
        matrix=matrix,
        train_weight=np.asarray(weights, dtype=float),
    )


def make_random_model(seed, n_features=3, n_interactions=2, max_cuts=6):
    rng = np.random.default_rng(seed)
    names = tuple(f"f{i}" for i in range(n_features))
    univariate = []
    for f in names:
        k = int(rng.integers(1, max_cuts + 1))
        cuts = np.unique(np.round(rng.normal(size=k) * 2.0, 3))
        edges = BinEdges(f, cuts)
        univariate.append(
            UnivariateTerm(
                feature=f,
                edges=edges,
                scores=rng.normal(size=edges.n_bins),
                train_weight=rng.integers(1, 50, size=edges.n_bins).astype(float),
                train_range=(-4.0, 4.0),
            )
        )
    pairs = list(combinations(names, 2))
    rng.shuffle(pairs)
    interactions = []
    for pair in pairs[:n_interactions]:
        cx = np.unique(np.round(rng.normal(size=3) * 2.0, 3))
        cy = np.unique(np.round(rng.normal(size=3) * 2.0, 3))
        shape = (cx.size + 1, cy.size + 1)
        interactions.append(
            InteractionTerm(
                features=pair,
                edges_x=BinEdges(pair[0], cx),
                edges_y=BinEdges(pair[1], cy),
                matrix=rng.normal(size=shape),
                train_weight=rng.integers(1, 30, size=shape).astype(float),
            )
        )
    order = {f: i for i, f in enumerate(names)}
    interactions.sort(key=lambda t: (order[t.features[0]], order[t.features[1]]))
    return EbmModel(
        intercept=float(rng.normal()),
        univariate=tuple(univariate),
        interactions=tuple(interactions),
        feature_names=names,
    )


def random_inputs(model, n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-5.0, 5.0, size=(n, len(model.feature_names)))


@pytest.fixture()
def worked_example_model():
    """Two features and one interaction with the walkthrough lookup values.

    The interaction cell is 0.21 so the total comes out at exactly -0.02, the
    score the walkthrough's probability (0.495) and predicted class pin down.
    """
    f1 = make_univariate("x1", [4.0, 6.0], [0.5, -0.36, 0.1], train_range=(0.0, 10.0))
    f2 = make_univariate("x2", [0.25, 0.75], [-0.2, 0.13, 0.4], train_range=(0.0, 1.0))
    f12 = make_interaction(
        ("x1", "x2"),
        [4.0, 6.0],
        [0.25, 0.75],
        [[0.0, 0.1, 0.0], [-0.1, 0.21, 0.3], [0.0, 0.2, 0.0]],
    )
    return EbmModel(
        intercept=0.0,
        univariate=(f1, f2),
        interactions=(f12,),
        feature_names=("x1", "x2"),
    )


@pytest.fixture()
def lookup_example_model():
    """Same walkthrough but with the interaction cell at its quoted 0.25."""
    f1 = make_univariate("x1", [4.0, 6.0], [0.5, -0.36, 0.1], train_range=(0.0, 10.0))
    f2 = make_univariate("x2", [0.25, 0.75], [-0.2, 0.13, 0.4], train_range=(0.0, 1.0))
    f12 = make_interaction(
        ("x1", "x2"),
        [4.0, 6.0],
        [0.25, 0.75],
        [[0.0, 0.1, 0.0], [-0.1, 0.25, 0.3], [0.0, 0.2, 0.0]],
    )
    return EbmModel(
        intercept=0.0,
        univariate=(f1, f2),
        interactions=(f12,),
        feature_names=("x1", "x2"),
    )


def toy_spec():
    """Small five-feature generator with enough structure that edits matter."""
    return gb.SyntheticSpec(
        ranges=(
            ("GWD", 0.4, 4.5),
            ("PGA", 0.18, 0.55),
            ("L", 0.005, 2.4),
            ("slope", 0.0, 14.0),
            ("elevation", 0.2, 9.0),
        ),
        intercept=0.3,
        linear=(("GWD", -2.0), ("PGA", 2.5), ("L", -2.2), ("elevation", -0.5)),
        products=(("PGA", "elevation", 6.0),),
        patches=(
            gb.Patch((("GWD", 0.0, 0.9),), -2.0),
            gb.Patch((("L", 0.0, 0.12),), 1.8),
            gb.Patch((("PGA", 0.5, 10.0),), -2.5),
        ),
        noise_sd=0.8,
    )


@pytest.fixture(scope="session")
def toy_dataset():
    ds = gb.generate_synthetic(toy_spec(), 2500, seed=11)
    return gb.split_dataset(ds, seed=3)


@pytest.fixture(scope="session")
def toy_model(toy_dataset):
    cfg = gb.TrainConfig(max_rounds=250, max_univariate_bins=64, early_stopping_rounds=30)
    return gb.train(toy_dataset.subset("train"), toy_dataset.subset("validation"), cfg)
