"""Command-line pipeline: ingest, train, edit, evaluate, explain, export, serve.

Every command writes its outputs under a run directory together with a
manifest (command, config snapshot, input hashes, seed, output paths,
timestamps) so runs can be replayed byte-for-byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import data as data_mod
from . import editor as editor_mod
from . import explain as explain_mod
from .data import (
    FEATURES,
    Dataset,
    christchurch_surrogate,
    generate_synthetic,
    load_dataset,
    split_dataset,
    summarize_feature,
    write_dataset,
)
from .editor import apply_domain_edits, default_edit_spec, load_edit_spec, sample_curve
from .explain import compare_models, evaluate, explain_site, importance
from .model import EbmModel, load_model, model_hash, save_model
from .trainer import TrainConfig, train


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    seed: int | None
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    started: str = ""
    finished: str = ""

    def add_input(self, path) -> None:
        path = Path(path)
        self.inputs[str(path)] = _sha256(path)

    def add_output(self, path) -> None:
        path = Path(path)
        self.outputs[str(path)] = _sha256(path)

    def write(self, out_dir: Path) -> Path:
        self.finished = time.strftime("%Y-%m-%dT%H:%M:%S")
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True), encoding="utf-8")
        return path


def _start_manifest(args, command: str, config: dict | None = None) -> tuple[Path, RunManifest]:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        command=command,
        argv=sys.argv[1:],
        config=config or {},
        seed=getattr(args, "seed", None),
        started=time.strftime("%Y-%m-%dT%H:%M:%S"),
    )
    return out_dir, manifest


def _load_config_file(path) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _column_mapping(args) -> dict[str, str]:
    mapping = {}
    for canonical, flag in (
        ("site_id", "col_site_id"),
        ("GWD", "col_gwd"),
        ("PGA", "col_pga"),
        ("L", "col_l"),
        ("slope", "col_slope"),
        ("elevation", "col_elevation"),
        ("label", "col_label"),
        ("displacement", "col_displacement"),
    ):
        value = getattr(args, flag, None)
        if value:
            mapping[canonical] = value
    return mapping


def _resolve_dataset(args, manifest: RunManifest) -> Dataset:
    if getattr(args, "synthetic", False):
        spec = christchurch_surrogate()
        n = args.n or data_mod.CHRISTCHURCH_N
        manifest.config["generator"] = "christchurch-surrogate"
        return generate_synthetic(spec, n, seed=args.seed)
    if not args.data:
        raise SystemExit("either --data or --synthetic is required")
    manifest.add_input(args.data)
    return load_dataset(args.data, columns=_column_mapping(args) or None)


def _ensure_split(ds: Dataset, args) -> Dataset:
    if ds.split:
        return ds
    return split_dataset(ds, seed=args.seed, stratify=getattr(args, "stratify", False))


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2), encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# -- commands ------------------------------------------------------------------


def cmd_ingest(args) -> int:
    out_dir, manifest = _start_manifest(args, "ingest")
    ds = _resolve_dataset(args, manifest)
    dataset_path = out_dir / "dataset.csv"
    write_dataset(ds, dataset_path)
    manifest.add_output(dataset_path)

    summaries = [summarize_feature(ds, f) for f in ds.feature_names]
    outlier_median = sorted(s.outlier_count for s in summaries)[len(summaries) // 2]
    rows = [
        [s.feature, s.q1, s.q3, s.iqr, s.lower_fence, s.upper_fence, s.outlier_count,
         s.min, s.max, "long-tail" if s.outlier_count > outlier_median else ""]
        for s in summaries
    ]
    summary_path = out_dir / "feature_summaries.csv"
    _write_csv(summary_path,
               ["feature", "q1", "q3", "iqr", "lower_fence", "upper_fence",
                "outlier_count", "min", "max", "flag"], rows)
    manifest.add_output(summary_path)

    if ds.generator is not None:
        gen_path = out_dir / "generator.json"
        _write_json(gen_path, ds.generator.to_dict())
        manifest.add_output(gen_path)

    manifest.write(out_dir)
    print(f"ingested {ds.n} rows ({int(ds.y.sum())} positive) -> {dataset_path}")
    for s in summaries:
        print(f"  {s.feature}: iqr={s.iqr:.3g} outliers={s.outlier_count}")
    return 0


def _train_config(args, overrides: dict) -> TrainConfig:
    cfg = {
        "learning_rate": 0.01,
        "max_rounds": 5000,
        "max_leaves": 3,
        "early_stopping_rounds": 50,
        "n_interactions": 10,
        "seed": args.seed,
        "max_univariate_bins": 256,
        "interaction_bins": 30,
    }
    cfg.update(overrides)
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    cfg["seed"] = args.seed
    return TrainConfig(**cfg)


def cmd_train(args) -> int:
    overrides = _load_config_file(args.config)
    out_dir, manifest = _start_manifest(args, "train")
    config = _train_config(args, overrides)
    manifest.config = config.to_dict()

    ds = _ensure_split(_resolve_dataset(args, manifest), args)
    split_path = out_dir / "dataset_split.csv"
    write_dataset(ds, split_path)
    manifest.add_output(split_path)

    log_path = out_dir / "train_log.jsonl"
    with log_path.open("w", encoding="utf-8") as log_fh:
        def log(record: dict) -> None:
            log_fh.write(json.dumps(record) + "\n")

        model = train(ds.subset("train"), ds.subset("validation"), config, log=log)
    manifest.add_output(log_path)

    model_path = out_dir / "model.json"
    save_model(model, model_path)
    manifest.add_output(model_path)

    eval_doc = {}
    for split in ("validation", "test"):
        eval_doc[split] = evaluate(model, ds, split).to_dict()
    eval_path = out_dir / "eval.json"
    _write_json(eval_path, eval_doc)
    manifest.add_output(eval_path)

    manifest.write(out_dir)
    test = eval_doc["test"]
    print(f"model {model_hash(model)[:12]} -> {model_path}")
    print(f"test accuracy={test['accuracy']:.3f} f1={test['f1']:.3f} auc={test['auc']:.3f}")
    return 0


def cmd_edit(args) -> int:
    out_dir, manifest = _start_manifest(args, "edit")
    manifest.add_input(args.model)
    model = load_model(args.model)
    if args.spec:
        manifest.add_input(args.spec)
        bundle = load_edit_spec(args.spec)
    else:
        bundle = default_edit_spec()
        manifest.config["spec"] = "default"

    edited, reports = apply_domain_edits(model, bundle)
    model_path = out_dir / "model_edited.json"
    save_model(edited, model_path)
    manifest.add_output(model_path)

    for report in reports:
        stem = f"edit_{report.pair[0]}_{report.pair[1]}"
        report_path = out_dir / f"{stem}.json"
        _write_json(report_path, report.to_dict())
        manifest.add_output(report_path)
        mask_path = out_dir / f"{stem}_mask.csv"
        _write_csv(mask_path, [f"c{j}" for j in range(report.mask.shape[1])],
                   report.mask.astype(int).tolist())
        manifest.add_output(mask_path)
        print(f"{report.pair}: replaced {report.replaced_fraction:.1%} of cells "
              f"({report.metric}, eps={report.epsilon})")

    manifest.write(out_dir)
    print(f"edited model {model_hash(edited)[:12]} -> {model_path}")
    return 0


def cmd_eval(args) -> int:
    out_dir, manifest = _start_manifest(args, "eval")
    manifest.add_input(args.model)
    model = load_model(args.model)
    ds = _ensure_split(_resolve_dataset(args, manifest), args)
    doc = {}
    for split in args.splits.split(","):
        split = split.strip()
        report = evaluate(model, ds, split)
        doc[split] = report.to_dict()
        print(f"{split}: accuracy={report.accuracy:.3f} precision={report.precision:.3f} "
              f"recall={report.recall:.3f} f1={report.f1:.3f} auc={report.auc:.3f}")
    eval_path = out_dir / "eval.json"
    _write_json(eval_path, doc)
    manifest.add_output(eval_path)
    manifest.write(out_dir)
    return 0


def cmd_explain(args) -> int:
    out_dir, manifest = _start_manifest(args, "explain")
    manifest.add_input(args.model)
    model = load_model(args.model)
    ds = _ensure_split(_resolve_dataset(args, manifest), args)

    if args.site is not None:
        exp = explain_site(model, ds, args.site)
        doc = exp.to_dict()
        path = out_dir / f"explanation_site_{args.site}.json"
        _write_json(path, doc)
        manifest.add_output(path)
        rows = [[name, value] for name, value in exp.contributions]
        csv_path = out_dir / f"explanation_site_{args.site}.csv"
        _write_csv(csv_path, ["term", "contribution"], rows)
        manifest.add_output(csv_path)
        print(f"site {args.site}: score={exp.score:+.3f} p={exp.probability:.3f} "
              f"label={exp.label}")
        for name, value in exp.contributions[:6]:
            print(f"  {name}: {value:+.3f}")
    else:
        ranking = importance(model, ds, split=args.split)
        path = out_dir / "importance.csv"
        _write_csv(path, ["term", "mean_abs_score"],
                   [[n, v] for n, v in ranking.entries])
        manifest.add_output(path)
        for name, value in ranking.entries:
            print(f"{name}: {value:.4f}")
    manifest.write(out_dir)
    return 0


def cmd_compare(args) -> int:
    out_dir, manifest = _start_manifest(args, "compare")
    manifest.add_input(args.model_a)
    manifest.add_input(args.model_b)
    model_a = load_model(args.model_a)
    model_b = load_model(args.model_b)
    ds = _ensure_split(_resolve_dataset(args, manifest), args)
    tm = compare_models(model_a, model_b, ds, args.split)

    doc = tm.to_dict()
    _write_json(out_dir / "transitions.json", doc)
    manifest.add_output(out_dir / "transitions.json")
    rows = []
    for row in tm.to_rows():
        feats = ds.features_of(row["site_id"])
        rows.append([row["site_id"], *(feats[f] for f in ds.feature_names),
                     row["before"], row["after"]])
    per_site = out_dir / "transitions_per_site.csv"
    _write_csv(per_site, ["site_id", *ds.feature_names, "before", "after"], rows)
    manifest.add_output(per_site)
    manifest.write(out_dir)
    for key, count in sorted(doc["counts"].items()):
        print(f"{key}: {count}")
    return 0


def cmd_export_curves(args) -> int:
    out_dir, manifest = _start_manifest(args, "export-curves")
    manifest.add_input(args.model)
    model = load_model(args.model)
    features = [args.feature] if args.feature else list(model.feature_names)

    written = 0
    for feature in features:
        term = model.term_for(feature)
        curve = sample_curve(model, feature, n=args.points)
        path = out_dir / f"curve_{feature}.csv"
        _write_csv(path, ["x", "score"], curve.tolist())
        manifest.add_output(path)
        edges_path = out_dir / f"bins_{feature}.csv"
        _write_csv(edges_path, ["bin", "score", "train_weight"],
                   [[i, s, w] for i, (s, w) in
                    enumerate(zip(term.scores, term.train_weight))])
        manifest.add_output(edges_path)
        written += 1

    if not args.feature:
        masks = {tuple(e["pair"]): e["mask"] for e in model.edit_log
                 if e.get("kind") == "interaction" and "mask" in e}
        for term in model.interactions:
            stem = f"matrix_{term.features[0]}_{term.features[1]}"
            path = out_dir / f"{stem}.csv"
            _write_csv(path, [f"c{j}" for j in range(term.matrix.shape[1])],
                       term.matrix.tolist())
            manifest.add_output(path)
            written += 1
            mask = masks.get(term.features)
            if mask is not None:
                mask_path = out_dir / f"{stem}_mask.csv"
                _write_csv(mask_path, [f"c{j}" for j in range(len(mask[0]))], mask)
                manifest.add_output(mask_path)
    manifest.write(out_dir)
    print(f"exported {written} term files to {out_dir}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model = load_model(args.model)
    ds = _ensure_split(_resolve_dataset(args, RunManifest("serve", [], {}, args.seed)), args)
    app = create_app(model, ds, ui_dir=Path(args.ui_dir) if args.ui_dir else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# -- parser ---------------------------------------------------------------------


def _add_data_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", help="dataset CSV path")
    parser.add_argument("--synthetic", action="store_true",
                        help="generate the synthetic surrogate dataset instead of reading a CSV")
    parser.add_argument("--n", type=int, default=None, help="synthetic row count")
    parser.add_argument("--stratify", action="store_true", help="stratify the split by label")
    for canonical, flag in (
        ("site_id", "--col-site-id"), ("GWD", "--col-gwd"), ("PGA", "--col-pga"),
        ("L", "--col-l"), ("slope", "--col-slope"), ("elevation", "--col-elevation"),
        ("label", "--col-label"), ("displacement", "--col-displacement"),
    ):
        parser.add_argument(flag, dest=flag.lstrip("-").replace("-", "_"), default=None,
                            help=f"CSV column for {canonical}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glassboost",
        description="Glass-box additive boosting with editable shape functions",
    )
    parser.add_argument("--out-dir", default="runs/latest", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for splits and synthesis")
    parser.add_argument("--config", help="JSON config file with training settings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a CSV or synthesize data; write summaries")
    _add_data_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train a model")
    _add_data_args(p)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)
    p.add_argument("--max-leaves", dest="max_leaves", type=int)
    p.add_argument("--early-stopping-rounds", dest="early_stopping_rounds", type=int)
    p.add_argument("--n-interactions", dest="n_interactions", type=int)
    p.add_argument("--max-univariate-bins", dest="max_univariate_bins", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("edit", help="apply a domain edit spec to a model")
    p.add_argument("--model", required=True)
    p.add_argument("--spec", help="edit spec JSON (defaults to the shipped spec)")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("eval", help="evaluate a model on splits")
    p.add_argument("--model", required=True)
    p.add_argument("--splits", default="validation,test")
    _add_data_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("explain", help="site explanation or global importance")
    p.add_argument("--model", required=True)
    p.add_argument("--site", type=int, default=None)
    p.add_argument("--split", default="train")
    _add_data_args(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("compare", help="prediction transitions between two models")
    p.add_argument("--model-a", dest="model_a", required=True)
    p.add_argument("--model-b", dest="model_b", required=True)
    p.add_argument("--split", default="test")
    _add_data_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-curves", help="write per-term curve and matrix tables")
    p.add_argument("--model", required=True)
    p.add_argument("--feature", default=None)
    p.add_argument("--points", type=int, default=100)
    p.set_defaults(func=cmd_export_curves)

    p = sub.add_parser("serve", help="run the local editing service")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", default=None, help="static UI directory to serve")
    _add_data_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
