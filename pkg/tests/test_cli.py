"""End-to-end CLI commands on small synthetic runs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import glassboost as gb
from glassboost.cli import main
from glassboost.model import load_model, model_to_json

from conftest import toy_spec


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Shared ingest + train artifacts for the CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    ds = gb.generate_synthetic(toy_spec(), 1200, seed=4)
    data_path = root / "data.csv"
    gb.write_dataset(ds, data_path)

    train_dir = root / "train"
    rc = main([
        "--out-dir", str(train_dir), "--seed", "5",
        "train", "--data", str(data_path),
        "--max-rounds", "60", "--max-univariate-bins", "32",
        "--early-stopping-rounds", "20",
    ])
    assert rc == 0
    return {"root": root, "data": data_path, "train_dir": train_dir,
            "model": train_dir / "model.json"}


class TestIngest:
    def test_synthetic_ingest_writes_artifacts(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["--out-dir", str(out), "--seed", "1",
                   "ingest", "--synthetic", "--n", "500"])
        assert rc == 0
        assert (out / "dataset.csv").exists()
        assert (out / "generator.json").exists()
        summaries = (out / "feature_summaries.csv").read_text().strip().splitlines()
        assert len(summaries) == 6  # header + five features
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "ingest"
        assert manifest["outputs"]

    def test_missing_column_fails_with_name(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("site_id,gwd_m,pga_g,l_km,slope_deg,label\n1,1,0.3,0.2,1,0\n")
        rc = main(["--out-dir", str(tmp_path / "o"), "ingest", "--data", str(bad)])
        assert rc == 1
        assert "elevation_m" in capsys.readouterr().err

    def test_long_tail_flags(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["--out-dir", str(out), "--seed", "2",
                   "ingest", "--synthetic", "--n", "3000"])
        assert rc == 0
        rows = (out / "feature_summaries.csv").read_text().strip().splitlines()[1:]
        flagged = [r.split(",")[0] for r in rows if r.endswith("long-tail")]
        assert flagged  # the skewed features carry the flag


class TestTrain:
    def test_artifacts_written(self, workdir):
        train_dir = workdir["train_dir"]
        assert (train_dir / "model.json").exists()
        assert (train_dir / "train_log.jsonl").exists()
        assert (train_dir / "eval.json").exists()
        log_lines = (train_dir / "train_log.jsonl").read_text().strip().splitlines()
        record = json.loads(log_lines[0])
        assert {"stage", "cycle", "train_loss", "val_loss"} <= set(record)

    def test_seeded_training_reproducible(self, workdir, tmp_path):
        out2 = tmp_path / "again"
        rc = main([
            "--out-dir", str(out2), "--seed", "5",
            "train", "--data", str(workdir["data"]),
            "--max-rounds", "60", "--max-univariate-bins", "32",
            "--early-stopping-rounds", "20",
        ])
        assert rc == 0
        a = load_model(workdir["model"])
        b = load_model(out2 / "model.json")
        assert model_to_json(a) == model_to_json(b)

    def test_single_round_runs(self, tmp_path, workdir):
        out = tmp_path / "quick"
        rc = main(["--out-dir", str(out), "--seed", "1",
                   "train", "--data", str(workdir["data"]),
                   "--max-rounds", "1", "--max-univariate-bins", "16"])
        assert rc == 0
        model = load_model(out / "model.json")
        assert len(model.univariate) == 5


class TestEditEvalCompare:
    def test_edit_with_default_spec(self, workdir, tmp_path):
        out = tmp_path / "edit"
        rc = main(["--out-dir", str(out),
                   "edit", "--model", str(workdir["model"])])
        assert rc == 0
        edited = load_model(out / "model_edited.json")
        assert edited.provenance == "domain_informed"
        masks = list(out.glob("edit_*_mask.csv"))
        assert len(masks) == 3

    def test_empty_spec_is_score_identical(self, workdir, tmp_path):
        spec_path = tmp_path / "empty.json"
        spec_path.write_text('{"univariate": [], "interactions": []}')
        out = tmp_path / "edit"
        rc = main(["--out-dir", str(out),
                   "edit", "--model", str(workdir["model"]), "--spec", str(spec_path)])
        assert rc == 0
        base = load_model(workdir["model"])
        edited = load_model(out / "model_edited.json")
        xs = np.random.default_rng(0).uniform(0, 3, size=(50, 5))
        assert np.array_equal(base.score_rows(xs), edited.score_rows(xs))

    def test_spec_with_unknown_feature_fails(self, workdir, tmp_path):
        spec_path = tmp_path / "bad.json"
        spec_path.write_text(json.dumps({
            "univariate": [{"feature": "mystery", "family": "step",
                            "breakpoints": [1.0], "levels": [1.0, 0.0]}],
            "interactions": [],
        }))
        rc = main(["--out-dir", str(tmp_path / "o"),
                   "edit", "--model", str(workdir["model"]), "--spec", str(spec_path)])
        assert rc == 1

    def test_eval_and_compare(self, workdir, tmp_path):
        edit_dir = tmp_path / "edit"
        assert main(["--out-dir", str(edit_dir),
                     "edit", "--model", str(workdir["model"])]) == 0
        out = tmp_path / "cmp"
        rc = main(["--out-dir", str(out), "--seed", "5",
                   "compare", "--model-a", str(workdir["model"]),
                   "--model-b", str(edit_dir / "model_edited.json"),
                   "--data", str(workdir["data"])])
        assert rc == 0
        doc = json.loads((out / "transitions.json").read_text())
        assert sum(doc["counts"].values()) == doc["n"]
        per_site = (out / "transitions_per_site.csv").read_text().strip().splitlines()
        assert len(per_site) == doc["n"] + 1

    def test_explain_site(self, workdir, tmp_path):
        out = tmp_path / "exp"
        rc = main(["--out-dir", str(out), "--seed", "5",
                   "explain", "--model", str(workdir["model"]),
                   "--data", str(workdir["data"]), "--site", "7"])
        assert rc == 0
        doc = json.loads((out / "explanation_site_7.json").read_text())
        total = doc["intercept"] + sum(v for _, v in doc["contributions"])
        assert total == pytest.approx(doc["score"], abs=1e-9)


class TestExportCurves:
    def test_full_export_counts(self, workdir, tmp_path):
        out = tmp_path / "curves"
        rc = main(["--out-dir", str(out),
                   "export-curves", "--model", str(workdir["model"])])
        assert rc == 0
        assert len(list(out.glob("curve_*.csv"))) == 5
        assert len(list(out.glob("matrix_*.csv"))) == 10

    def test_edited_model_exports_masks(self, workdir, tmp_path):
        edit_dir = tmp_path / "edit"
        assert main(["--out-dir", str(edit_dir),
                     "edit", "--model", str(workdir["model"])]) == 0
        out = tmp_path / "curves"
        rc = main(["--out-dir", str(out),
                   "export-curves", "--model", str(edit_dir / "model_edited.json")])
        assert rc == 0
        assert len(list(out.glob("matrix_*_mask.csv"))) == 3

    def test_single_feature_export(self, workdir, tmp_path):
        out = tmp_path / "one"
        rc = main(["--out-dir", str(out),
                   "export-curves", "--model", str(workdir["model"]),
                   "--feature", "GWD"])
        assert rc == 0
        assert list(out.glob("curve_*.csv")) == [out / "curve_GWD.csv"]


class TestManifest:
    def test_inputs_and_outputs_hashed(self, workdir):
        manifest = json.loads((workdir["train_dir"] / "manifest.json").read_text())
        assert str(workdir["data"]) in manifest["inputs"]
        for digest in manifest["inputs"].values():
            assert len(digest) == 64
        assert manifest["seed"] == 5
        assert manifest["config"]["learning_rate"] == 0.01
