"""Lookups, scoring, the logistic link, centering, and serialization."""

from __future__ import annotations

import numpy as np
import pytest

import glassboost as gb
from glassboost.model import (
    BinEdges,
    EbmModel,
    ModelFormatError,
    center_terms,
    model_to_dict,
    model_to_json,
)

from conftest import make_interaction, make_random_model, make_univariate, random_inputs


class TestBinEdges:
    def test_strictly_increasing_required(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            BinEdges("f", [1.0, 1.0, 2.0])

    def test_right_closed_boundary(self):
        edges = BinEdges("f", [1.0, 2.0])
        assert edges.bin_of(1.0) == 0
        assert edges.bin_of(1.0000001) == 1
        assert edges.bin_of(2.0) == 1
        assert edges.bin_of(-100.0) == 0
        assert edges.bin_of(100.0) == 2

    def test_totality_every_finite_input_has_one_bin(self):
        edges = BinEdges("f", np.linspace(-3, 3, 17))
        xs = np.random.default_rng(0).uniform(-10, 10, 500)
        idx = edges.bin_indices(xs)
        assert ((0 <= idx) & (idx < edges.n_bins)).all()

    def test_non_finite_rejected(self):
        edges = BinEdges("f", [0.0])
        with pytest.raises(ValueError, match="finite"):
            edges.bin_of(float("nan"))

    def test_max_cuts_enforced(self):
        cuts = np.arange(256.0)
        with pytest.raises(ValueError, match="255"):
            make_univariate("f", cuts, np.zeros(257))


class TestLookups:
    def test_worked_example_univariate(self, lookup_example_model):
        assert lookup_example_model.term_for("x1").lookup(5.0) == pytest.approx(-0.36)
        assert lookup_example_model.term_for("x2").lookup(0.5) == pytest.approx(0.13)

    def test_worked_example_bivariate(self, lookup_example_model):
        assert lookup_example_model.interaction_for(("x1", "x2")).lookup(5.0, 0.5) == 0.25

    def test_single_bin_term(self):
        term = make_univariate("f", [], [0.5])
        for x in (-1e9, 0.0, 3.7, 1e9):
            assert term.lookup(x) == 0.5

    def test_cut_boundary_goes_left(self):
        term = make_univariate("f", [1.0], [-1.0, 1.0])
        assert term.lookup(1.0) == -1.0

    def test_constant_zero_matrix(self):
        term = make_interaction(("a", "b"), [0.0], [0.0], np.zeros((2, 2)))
        assert term.lookup(5.0, -5.0) == 0.0

    def test_corner_clamping(self):
        matrix = np.arange(9.0).reshape(3, 3)
        term = make_interaction(("a", "b"), [0.0, 1.0], [0.0, 1.0], matrix)
        assert term.lookup(99.0, 99.0) == matrix[2, 2]
        assert term.lookup(-99.0, -99.0) == matrix[0, 0]


class TestScore:
    def test_worked_example_total(self, worked_example_model):
        s = worked_example_model.score({"x1": 5.0, "x2": 0.5})
        assert s == pytest.approx(-0.02, abs=1e-12)
        assert worked_example_model.predict_proba({"x1": 5.0, "x2": 0.5}) == pytest.approx(
            0.495, abs=5e-4
        )
        assert worked_example_model.predict_label({"x1": 5.0, "x2": 0.5}) == 0

    def test_zero_terms_returns_intercept(self):
        model = EbmModel(
            intercept=1.7,
            univariate=(make_univariate("a", [0.0], [0.0, 0.0]),),
            interactions=(),
            feature_names=("a",),
        )
        assert model.score({"a": 3.0}) == 1.7

    def test_missing_feature(self, worked_example_model):
        with pytest.raises(KeyError, match="missing features"):
            worked_example_model.score({"x1": 5.0})

    def test_additivity_matches_contributions(self):
        model = make_random_model(3)
        X = random_inputs(model, 50, seed=1)
        names, contrib = model.contributions_rows(X)
        scores = model.score_rows(X)
        assert np.allclose(scores, model.intercept + contrib.sum(axis=1), atol=1e-12, rtol=0)

    def test_score_rows_matches_scalar_score(self):
        model = make_random_model(4)
        X = random_inputs(model, 20, seed=2)
        for row in X:
            x = dict(zip(model.feature_names, row))
            assert model.score(x) == pytest.approx(
                model.score_rows(row[None, :])[0], abs=1e-12
            )


class TestPredictProba:
    def test_half_at_zero_score(self):
        model = EbmModel(
            intercept=0.0,
            univariate=(make_univariate("a", [], [0.0]),),
            interactions=(),
            feature_names=("a",),
        )
        assert model.predict_proba({"a": 0.0}) == 0.5
        assert model.predict_label({"a": 0.0}) == 1  # boundary inclusive

    def test_high_score_no_overflow(self):
        import mpmath

        for s in (40.0, 700.0, -700.0):
            model = EbmModel(
                intercept=s,
                univariate=(make_univariate("a", [], [0.0]),),
                interactions=(),
                feature_names=("a",),
            )
            p = model.predict_proba({"a": 0.0})
            expected = float(1 / (1 + mpmath.exp(-mpmath.mpf(s))))
            assert p == pytest.approx(expected, rel=1e-12, abs=1e-300)

    def test_monotone_link(self):
        from scipy.special import expit

        scores = np.linspace(-30, 30, 101)
        probas = expit(scores)
        assert (np.diff(probas) > 0).all()

    def test_threshold_validation(self, worked_example_model):
        x = {"x1": 5.0, "x2": 0.5}
        with pytest.raises(ValueError, match="threshold"):
            worked_example_model.predict_label(x, threshold=0.0)
        assert worked_example_model.predict_label(x, threshold=0.9) == 0


class TestCentering:
    def test_constant_term_moves_to_intercept(self):
        model = EbmModel(
            intercept=0.5,
            univariate=(make_univariate("a", [0.0], [2.0, 2.0]),),
            interactions=(),
            feature_names=("a",),
        )
        centered = center_terms(model)
        assert centered.intercept == pytest.approx(2.5)
        assert np.allclose(centered.term_for("a").scores, 0.0)

    def test_idempotent(self):
        model = center_terms(make_random_model(5))
        again = center_terms(model)
        assert again.intercept == pytest.approx(model.intercept, abs=1e-12)
        for t1, t2 in zip(model.univariate, again.univariate):
            assert np.allclose(t1.scores, t2.scores, atol=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_weighted_mean_zero_and_prediction_invariance(self, seed):
        model = make_random_model(seed, n_features=4, n_interactions=3)
        centered = center_terms(model)
        for term in centered.univariate + centered.interactions:
            assert abs(term.weighted_mean()) < 1e-9
        X = random_inputs(model, 1000, seed=seed)
        assert np.max(np.abs(model.score_rows(X) - centered.score_rows(X))) < 1e-9

    def test_zero_weight_errors(self):
        model = EbmModel(
            intercept=0.0,
            univariate=(make_univariate("a", [0.0], [1.0, 2.0], weights=[0.0, 0.0]),),
            interactions=(),
            feature_names=("a",),
        )
        with pytest.raises(ValueError, match="zero total"):
            center_terms(model)


class TestSerialization:
    def test_round_trip_scores_bitwise(self, tmp_path):
        model = make_random_model(9, n_features=4, n_interactions=4)
        path = tmp_path / "model.json"
        gb.save_model(model, path)
        back = gb.load_model(path)
        X = random_inputs(model, 1000, seed=3)
        assert np.array_equal(model.score_rows(X), back.score_rows(X))
        assert model_to_json(model) == model_to_json(back)

    def test_unknown_version_rejected(self, tmp_path):
        model = make_random_model(1)
        doc = model_to_dict(model)
        doc["schema_version"] = "glassboost-model/999"
        path = tmp_path / "bad.json"
        path.write_text(__import__("json").dumps(doc), encoding="utf-8")
        with pytest.raises(ModelFormatError, match="schema version"):
            gb.load_model(path)

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ModelFormatError, match="not valid JSON"):
            gb.load_model(path)

    def test_provenance_and_edit_log_preserved(self, tmp_path):
        from dataclasses import replace

        model = replace(
            make_random_model(2),
            provenance="domain_informed",
            edit_log=({"kind": "univariate", "feature": "f0"},),
        )
        path = tmp_path / "model.json"
        gb.save_model(model, path)
        back = gb.load_model(path)
        assert back.provenance == "domain_informed"
        assert back.edit_log == ({"kind": "univariate", "feature": "f0"},)

    def test_model_hash_stable(self):
        model = make_random_model(4)
        assert gb.model_hash(model) == gb.model_hash(model)
        other = make_random_model(5)
        assert gb.model_hash(model) != gb.model_hash(other)


class TestModelInvariants:
    def test_one_term_per_feature_enforced(self):
        with pytest.raises(ValueError, match="one univariate term"):
            EbmModel(
                intercept=0.0,
                univariate=(make_univariate("a", [], [0.0]),),
                interactions=(),
                feature_names=("a", "b"),
            )

    def test_duplicate_interaction_rejected(self):
        uni = (make_univariate("a", [], [0.0]), make_univariate("b", [], [0.0]))
        inter = make_interaction(("a", "b"), [0.0], [0.0], np.zeros((2, 2)))
        with pytest.raises(ValueError, match="duplicate"):
            EbmModel(
                intercept=0.0,
                univariate=uni,
                interactions=(inter, inter),
                feature_names=("a", "b"),
            )

    def test_pair_order_enforced(self):
        uni = (make_univariate("a", [], [0.0]), make_univariate("b", [], [0.0]))
        inter = make_interaction(("b", "a"), [0.0], [0.0], np.zeros((2, 2)))
        with pytest.raises(ValueError, match="feature order"):
            EbmModel(
                intercept=0.0,
                univariate=uni,
                interactions=(inter,),
                feature_names=("a", "b"),
            )
