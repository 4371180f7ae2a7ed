"""Ingestion, labeling, summaries, splits, and synthetic generation."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

import glassboost as gb
from glassboost.data import IngestError

HEADER = "site_id,gwd_m,pga_g,l_km,slope_deg,elevation_m,label"


def write_csv(tmp_path, lines, name="data.csv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestLoadDataset:
    def test_single_row(self, tmp_path):
        path = write_csv(tmp_path, [HEADER, "1,1.2,0.4,0.3,2.0,4.5,1"])
        ds = gb.load_dataset(path)
        assert ds.n == 1
        assert ds.y.tolist() == [1]
        assert ds.features_of(1) == {"GWD": 1.2, "PGA": 0.4, "L": 0.3, "slope": 2.0,
                                     "elevation": 4.5}

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(IngestError, match="no rows"):
            gb.load_dataset(path)

    def test_header_only(self, tmp_path):
        path = write_csv(tmp_path, [HEADER])
        with pytest.raises(IngestError, match="no rows"):
            gb.load_dataset(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestError, match="no such file"):
            gb.load_dataset(tmp_path / "nope.csv")

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path, ["site_id,gwd_m,pga_g,l_km,slope_deg,label",
                                    "1,1.0,0.4,0.3,2.0,1"])
        with pytest.raises(IngestError, match="elevation_m"):
            gb.load_dataset(path)

    def test_non_numeric_cell_reports_row_and_column(self, tmp_path):
        path = write_csv(tmp_path, [HEADER,
                                    "1,1.2,0.4,0.3,2.0,4.5,1",
                                    "2,oops,0.4,0.3,2.0,4.5,0"])
        with pytest.raises(IngestError) as err:
            gb.load_dataset(path)
        assert err.value.row_errors == [(1, "gwd_m", "non-numeric cell 'oops'")]

    def test_displacement_routing(self, tmp_path):
        header = "site_id,gwd_m,pga_g,l_km,slope_deg,elevation_m,displacement_m"
        path = write_csv(tmp_path, [header,
                                    "1,1.2,0.4,0.3,2.0,4.5,0.29",
                                    "2,1.2,0.4,0.3,2.0,4.5,0.31",
                                    "3,1.2,0.4,0.3,2.0,4.5,0.0"])
        ds = gb.load_dataset(path)
        assert ds.y.tolist() == [0, 1, 0]

    def test_both_label_and_displacement_mapped(self, tmp_path):
        header = HEADER + ",displacement_m"
        path = write_csv(tmp_path, [header, "1,1.2,0.4,0.3,2.0,4.5,1,0.5"])
        with pytest.raises(IngestError, match="not both"):
            gb.load_dataset(path, columns={"label": "label", "displacement": "displacement_m"})
        # Unmapped, the label column wins by default.
        ds = gb.load_dataset(path)
        assert ds.y.tolist() == [1]

    def test_bad_label_value(self, tmp_path):
        path = write_csv(tmp_path, [HEADER, "1,1.2,0.4,0.3,2.0,4.5,2"])
        with pytest.raises(IngestError, match="label must be 0 or 1"):
            gb.load_dataset(path)

    def test_round_trip_exact(self, tmp_path):
        spec = gb.SyntheticSpec()
        ds = gb.split_dataset(gb.generate_synthetic(spec, 60, seed=5), seed=9)
        path = tmp_path / "roundtrip.csv"
        gb.write_dataset(ds, path)
        back = gb.load_dataset(path)
        assert back.site_ids.tolist() == ds.site_ids.tolist()
        assert back.y.tolist() == ds.y.tolist()
        assert np.array_equal(back.X, ds.X)
        assert back.split == ds.split


class TestLabelFromDisplacement:
    @pytest.mark.parametrize("d,expected", [(0.29, 0), (0.31, 1), (0.0, 0), (0.3, 1)])
    def test_threshold(self, d, expected):
        assert gb.label_from_displacement(d) == expected

    @pytest.mark.parametrize("d", [-0.1, float("nan"), float("inf")])
    def test_invalid(self, d):
        with pytest.raises(ValueError):
            gb.label_from_displacement(d)


def dataset_from_values(values, feature="GWD"):
    values = np.asarray(values, dtype=float)
    n = values.size
    X = np.column_stack([values] + [np.linspace(0, 1, n)] * 4)
    return gb.Dataset(
        site_ids=np.arange(n),
        X=X,
        y=np.zeros(n, dtype=np.int8),
        feature_names=(feature, "PGA", "L", "slope", "elevation"),
    )


class TestSummarizeFeature:
    def test_linear_interpolated_quartiles(self):
        ds = dataset_from_values([1, 2, 3, 4, 5, 6, 7, 8])
        s = gb.summarize_feature(ds, "GWD")
        assert s.q1 == pytest.approx(2.75)
        assert s.q3 == pytest.approx(6.25)
        assert s.iqr == pytest.approx(3.5)
        assert s.lower_fence == pytest.approx(2.75 - 1.5 * 3.5)
        assert s.upper_fence == pytest.approx(6.25 + 1.5 * 3.5)

    def test_constant_sample(self):
        s = gb.summarize_feature(dataset_from_values([5, 5, 5, 5]), "GWD")
        assert s.iqr == 0
        assert s.outlier_count == 0

    def test_single_outlier(self):
        s = gb.summarize_feature(dataset_from_values([1, 1, 1, 1, 100]), "GWD")
        assert s.outlier_count == 1

    def test_permutation_invariant(self):
        rng = np.random.default_rng(0)
        values = rng.normal(size=200) ** 3
        base = gb.summarize_feature(dataset_from_values(values), "GWD")
        shuffled = gb.summarize_feature(
            dataset_from_values(values[rng.permutation(200)]), "GWD"
        )
        assert shuffled.outlier_count == base.outlier_count
        assert shuffled.q1 == pytest.approx(base.q1)

    def test_errors(self):
        with pytest.raises(KeyError):
            gb.summarize_feature(dataset_from_values([1, 2, 3, 4]), "nope")
        with pytest.raises(ValueError, match="at least 4"):
            gb.summarize_feature(dataset_from_values([1, 2, 3]), "GWD")


class TestSplitDataset:
    def test_exact_division(self):
        ds = gb.generate_synthetic(gb.SyntheticSpec(), 100, seed=0)
        out = gb.split_dataset(ds, seed=4)
        sizes = {name: out.subset(name).n for name in ("train", "validation", "test")}
        assert sizes == {"train": 70, "validation": 15, "test": 15}

    def test_deterministic(self):
        ds = gb.generate_synthetic(gb.SyntheticSpec(), 123, seed=0)
        a = gb.split_dataset(ds, seed=7)
        b = gb.split_dataset(ds, seed=7)
        assert a.split == b.split

    def test_christchurch_sized_split(self):
        ds = gb.generate_synthetic(gb.SyntheticSpec(), 7291, seed=0)
        out = gb.split_dataset(ds, seed=1)
        assert out.subset("train").n in (5103, 5104)
        # every split size within one row of its exact share
        for name, ratio in zip(("train", "validation", "test"), (0.7, 0.15, 0.15)):
            assert abs(out.subset(name).n - ratio * 7291) < 1.0

    def test_partition(self):
        ds = gb.generate_synthetic(gb.SyntheticSpec(), 501, seed=2)
        out = gb.split_dataset(ds, seed=2)
        assert set(out.split) == set(ds.site_ids.tolist())
        total = sum(out.subset(n).n for n in ("train", "validation", "test"))
        assert total == ds.n

    def test_stratified(self):
        ds = gb.generate_synthetic(gb.SyntheticSpec(), 2000, seed=3)
        out = gb.split_dataset(ds, seed=3, stratify=True)
        overall = ds.y.mean()
        for name in ("train", "validation", "test"):
            assert out.subset(name).y.mean() == pytest.approx(overall, abs=0.02)

    @pytest.mark.parametrize("ratios", [(0.5, 0.5, 0.5), (0.7, 0.2, 0.2), (-0.1, 0.6, 0.5)])
    def test_invalid_ratios(self, ratios):
        ds = gb.generate_synthetic(gb.SyntheticSpec(), 50, seed=0)
        with pytest.raises(ValueError):
            gb.split_dataset(ds, ratios=ratios, seed=0)


class TestGenerateSynthetic:
    def test_deterministic(self):
        spec = gb.SyntheticSpec()
        a = gb.generate_synthetic(spec, 1000, seed=7)
        b = gb.generate_synthetic(spec, 1000, seed=7)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(a.y, b.y)

    def test_n_too_small(self):
        with pytest.raises(ValueError, match="n >= 10"):
            gb.generate_synthetic(gb.SyntheticSpec(), 5, seed=0)

    def test_pga_coefficient_drives_rate(self):
        spec = gb.SyntheticSpec(intercept=-0.5, linear=(("PGA", 3.0),))
        ds = gb.generate_synthetic(spec, 20000, seed=13)
        pga = ds.column("PGA")
        qs = np.quantile(pga, [0.25, 0.5, 0.75])
        groups = np.digitize(pga, qs)
        rates = [ds.y[groups == g].mean() for g in range(4)]
        assert all(b > a for a, b in zip(rates, rates[1:]))

    def test_zero_coefficients_flat_rate(self):
        spec = gb.SyntheticSpec(intercept=-0.3, linear=())
        ds = gb.generate_synthetic(spec, 20000, seed=17)
        base = ds.y.mean()
        for feature in ds.feature_names:
            vals = ds.column(feature)
            qs = np.quantile(vals, [0.25, 0.5, 0.75])
            groups = np.digitize(vals, qs)
            for g in range(4):
                assert ds.y[groups == g].mean() == pytest.approx(base, abs=0.03)

    def test_ground_truth_recorded(self):
        spec = gb.christchurch_surrogate()
        ds = gb.generate_synthetic(spec, 3000, seed=1)
        assert ds.generator is spec
        # pinned demonstration site carries the canonical profile
        feats = ds.features_of(2639)
        assert feats["L"] == pytest.approx(0.09)
        assert feats["PGA"] == pytest.approx(0.52)


@given(st.floats(min_value=0.0, max_value=10.0, allow_nan=False))
def test_label_threshold_property(d):
    assert gb.label_from_displacement(d) == (1 if d >= 0.3 else 0)
