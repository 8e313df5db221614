"""Command-line entry point: ``tsnn {synth,select,train,evaluate,pipeline}``.

The end-to-end run is ingest -> split -> normalize -> total-index selection
-> network on the selected columns -> linear baselines on all columns ->
evaluation on the shared held-out split.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dataio, sampling, sensitivity, surrogate
from .config import ConfigError, PipelineConfig, load_config, save_config
from .models import (
    EvalRow,
    ModelFileError,
    TrainingError,
    evaluate,
    load_model,
    save_model,
    score_predictions,
    train_linear_svm,
    train_logistic,
    train_mlp,
    write_report_csv,
    write_report_json,
)
from .models.metrics import format_report

log = logging.getLogger("tsnn")

CONFIG_FILE = "config.yaml"
RANKING_CSV = "ranking.csv"
RANKING_JSON = "ranking.json"
SENSITIVITY_JSON = "sensitivity.json"
EVALUATION_CSV = "evaluation.csv"
EVALUATION_JSON = "evaluation.json"
TSNN_MODEL = "tsnn_model.json"
LOGISTIC_MODEL = "lr_model.json"
SVM_MODEL = "svm_model.json"
TEST_CSV = "test.csv"


class PipelineError(RuntimeError):
    """A stage failed; the message starts with the stage name."""


_EXPECTED = (dataio.DataError, ConfigError, ModelFileError, TrainingError, ValueError, OSError)


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except _EXPECTED as exc:
        raise PipelineError(f"[{name}] {exc}") from exc


@dataclass
class Selection:
    train: dataio.FlowDataset
    test: dataio.FlowDataset  # scaled with the training min/max
    raw_test: dataio.FlowDataset
    report: sensitivity.SensitivityReport
    ranking: sensitivity.FeatureRanking
    selected: list[int]


def _prepare_out(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out)
    with stage("output"):
        out.mkdir(parents=True, exist_ok=True)
        save_config(cfg, out / CONFIG_FILE)
    return out


def load_dataset(cfg: PipelineConfig) -> dataio.FlowDataset:
    with stage("ingest"):
        if cfg.input is None:
            return dataio.generate_synthetic(cfg.synthetic_spec())
        return dataio.load_csv(cfg.input, cfg.label_column)


def run_selection(cfg: PipelineConfig, ds: dataio.FlowDataset) -> Selection:
    with stage("split"):
        raw_train, raw_test = dataio.stratified_split(ds, cfg.split_spec())
    with stage("normalize"):
        train = dataio.fit_normalize(raw_train)
        test = dataio.apply_scaling(raw_test, train.scaling)
    with stage("select"):
        if cfg.top_k > train.n_features:
            raise ValueError(f"top_k={cfg.top_k} exceeds the {train.n_features} available features")
        f = surrogate.fit(train, cfg.neighbors)
        plan = sampling.build_plan(cfg.tsi_samples, train.n_features, cfg.stage_seeds()["sampling"])
        report = sensitivity.estimate_tsi(f, plan, train.column_names)
        if report.degenerate:
            log.warning("training labels have no variance under the surrogate; all total indices are 0")
        ranking = sensitivity.rank_features(report)
        selected = sensitivity.select_top(ranking, cfg.top_k)
    return Selection(train, test, raw_test, report, ranking, selected)


def _write_selection(sel: Selection, cfg: PipelineConfig, out: Path) -> None:
    with stage("report"):
        sensitivity.write_ranking_csv(sel.ranking, out / RANKING_CSV, cfg.top_k)
        sensitivity.write_ranking_json(sel.ranking, out / RANKING_JSON, cfg.top_k)
        (out / SENSITIVITY_JSON).write_text(json.dumps(sel.report.to_dict(), indent=2) + "\n", encoding="utf-8")


def cmd_select(cfg: PipelineConfig) -> Selection:
    out = _prepare_out(cfg)
    sel = run_selection(cfg, load_dataset(cfg))
    _write_selection(sel, cfg, out)
    print(sensitivity.format_ranking(sel.ranking, cfg.top_k))
    return sel


def _train_tsnn(cfg: PipelineConfig, sel: Selection, out: Path):
    with stage("train"):
        model = train_mlp(sel.train, sel.selected, cfg.train_config("tsnn"))
        save_model(model, out / TSNN_MODEL, scaling=sel.train.scaling[sel.selected])
    return model


def cmd_train(cfg: PipelineConfig):
    out = _prepare_out(cfg)
    sel = run_selection(cfg, load_dataset(cfg))
    _write_selection(sel, cfg, out)
    model = _train_tsnn(cfg, sel, out)
    print(f"trained network on {len(sel.selected)} features: {', '.join(model.feature_names)}")
    return model


def cmd_pipeline(cfg: PipelineConfig) -> list[EvalRow]:
    out = _prepare_out(cfg)
    sel = run_selection(cfg, load_dataset(cfg))
    _write_selection(sel, cfg, out)
    with stage("export"):
        dataio.write_csv(sel.raw_test, out / TEST_CSV, cfg.label_column)
    tsnn = _train_tsnn(cfg, sel, out)
    every = list(range(sel.train.n_features))
    with stage("baselines"):
        svm = train_linear_svm(sel.train, every, cfg.train_config("svm"), l2_lambda=cfg.svm_l2)
        lr = train_logistic(sel.train, every, cfg.train_config("logistic"), l2_lambda=cfg.logistic_l2)
        save_model(svm, out / SVM_MODEL, scaling=sel.train.scaling)
        save_model(lr, out / LOGISTIC_MODEL, scaling=sel.train.scaling)
    with stage("evaluate"):
        rows = [
            evaluate(tsnn, sel.test, name="TSNN"),
            evaluate(svm, sel.test, name="SVM"),
            evaluate(lr, sel.test, name="LR"),
        ]
        write_report_csv(rows, out / EVALUATION_CSV)
        write_report_json(rows, out / EVALUATION_JSON)
    print(sensitivity.format_ranking(sel.ranking, cfg.top_k))
    print()
    print(format_report(rows))
    return rows


def model_inputs(model, scaling, ds: dataio.FlowDataset) -> np.ndarray:
    """Pick and scale the columns ``model`` reads from a raw dataset."""
    width = model.input_width
    if model.feature_names is not None:
        missing = [n for n in model.feature_names if n not in ds.column_names]
        if missing:
            raise dataio.DataError(
                f"model expects {width} input features but the dataset provides "
                f"{width - len(missing)} of them (has {ds.n_features} columns; missing {', '.join(missing)})"
            )
        picked = ds.select_columns([ds.column_names.index(n) for n in model.feature_names])
    elif ds.n_features == width:
        picked = ds
    else:
        raise dataio.DataError(f"model expects {width} input features, dataset has {ds.n_features}")
    if scaling is not None:
        picked = dataio.apply_scaling(picked, scaling)
    return picked.features


def cmd_evaluate(model_path: str | Path, dataset_path: str | Path, label_column: str = dataio.DEFAULT_LABEL_COLUMN,
                 out: str | Path | None = None, name: str | None = None, threshold: float = 0.5) -> EvalRow:
    with stage("load-model"):
        model, scaling = load_model(model_path)
    with stage("ingest"):
        ds = dataio.load_csv(dataset_path, label_column)
    with stage("evaluate"):
        X = model_inputs(model, scaling, ds)
        row = score_predictions(model.predict_proba(X) > threshold, ds.labels,
                                name or model.kind, model.input_width)
    if out is not None:
        with stage("report"):
            out = Path(out)
            out.mkdir(parents=True, exist_ok=True)
            write_report_csv([row], out / EVALUATION_CSV)
            write_report_json([row], out / EVALUATION_JSON)
    print(format_report([row]))
    return row


def cmd_synth(spec: dataio.SyntheticSpec, path: str | Path, label_column: str) -> dataio.FlowDataset:
    with stage("synth"):
        ds = dataio.generate_synthetic(spec)
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        dataio.write_csv(ds, path, label_column)
    n_benign, n_attack = ds.class_counts()
    print(f"wrote {ds.n_rows} rows ({n_benign} benign, {n_attack} DDoS) to {path}")
    return ds


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat YAML config file; flags override its values")
    p.add_argument("--input", help="flow CSV; omit to use a synthetic dataset")
    p.add_argument("--label-column", help="label column name (default Label)")
    p.add_argument("--top-k", type=int, help="number of features kept for the network (default 10)")
    p.add_argument("--tsi-samples", type=int, help="rows n of each sampling matrix (default 4096)")
    p.add_argument("--neighbors", type=int, help="neighbours averaged by the surrogate (default 5)")
    p.add_argument("--epochs", type=int, help="training epochs (default 200)")
    p.add_argument("--batch-size", type=int, help="mini-batch size (default 500)")
    p.add_argument("--seed", type=int, help="global seed; every stage seed derives from it")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsnn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("select", "rank features by total sensitivity index"),
        ("train", "select features and train the network"),
        ("pipeline", "select, train all models and write the benchmark table"),
    ]:
        _pipeline_flags(sub.add_parser(name, help=help_text))

    ev = sub.add_parser("evaluate", help="score a saved model on a CSV dataset")
    ev.add_argument("--model", required=True, help="model JSON written by train or pipeline")
    ev.add_argument("--input", required=True, help="flow CSV with the model's feature columns")
    ev.add_argument("--label-column", default=dataio.DEFAULT_LABEL_COLUMN)
    ev.add_argument("--threshold", type=float, default=0.5, help="probability cut for the DDoS class")
    ev.add_argument("--name", help="algorithm name in the report (default: model kind)")
    ev.add_argument("--out", help="directory for evaluation.csv/json")

    sy = sub.add_parser("synth", help="write a synthetic flow CSV")
    sy.add_argument("--rows", type=int, default=600)
    sy.add_argument("--features", type=int, default=10)
    sy.add_argument("--informative", type=_int_list, default=(0, 3), help="comma-separated column indices")
    sy.add_argument("--effect-size", type=float, default=0.8, help="class shift on informative columns, in [0, 1)")
    sy.add_argument("--class-ratio", type=float, default=5.0, help="benign rows per DDoS row")
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--label-column", default=dataio.DEFAULT_LABEL_COLUMN)
    sy.add_argument("--out", required=True, help="output CSV path")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    base = load_config(args.config) if args.config else PipelineConfig()
    return base.with_overrides(
        input=args.input,
        label_column=args.label_column,
        top_k=args.top_k,
        tsi_samples=args.tsi_samples,
        neighbors=args.neighbors,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        out=args.out,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "synth":
            with stage("synth"):
                spec = dataio.SyntheticSpec(args.rows, args.features, args.informative,
                                            args.class_ratio, args.effect_size, args.seed)
            cmd_synth(spec, args.out, args.label_column)
        elif args.command == "evaluate":
            cmd_evaluate(args.model, args.input, args.label_column, args.out, args.name, args.threshold)
        else:
            with stage("config"):
                cfg = resolve_config(args)
            {"select": cmd_select, "train": cmd_train, "pipeline": cmd_pipeline}[args.command](cfg)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
