"""Accuracy, precision and recall with DDoS (label 1) as the positive class."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..dataio import DataError, FlowDataset
from .training import BinaryModel

REPORT_FIELDS = ["algorithm", "n_features", "accuracy", "precision", "recall", "precision_undefined"]


@dataclass(frozen=True)
class EvalRow:
    """One line of the benchmark table.

    ``precision_undefined`` is set when nothing was predicted positive; the
    precision is then 1.0 if the test set has no positives either, else 0.0.
    """

    algorithm: str
    n_features: int
    accuracy: float
    precision: float
    recall: float
    precision_undefined: bool = False


def confusion_counts(predicted, actual) -> tuple[int, int, int, int]:
    """(tp, fp, tn, fn) for 0/1 vectors."""
    predicted = np.asarray(predicted).astype(bool)
    actual = np.asarray(actual).astype(bool)
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    tn = int(np.sum(~predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    return tp, fp, tn, fn


def score_predictions(predicted, actual, algorithm: str = "model", n_features: int = 0) -> EvalRow:
    predicted = np.asarray(predicted)
    if predicted.size == 0:
        raise DataError("cannot score an empty prediction vector")
    tp, fp, tn, fn = confusion_counts(predicted, actual)
    undefined = tp + fp == 0
    if undefined:
        precision = 1.0 if tp + fn == 0 else 0.0
    else:
        precision = tp / (tp + fp)
    recall = tp / (tp + fn) if tp + fn else 1.0
    return EvalRow(algorithm, int(n_features), (tp + tn) / predicted.size, precision, recall, undefined)


def evaluate(model: BinaryModel, test: FlowDataset, threshold: float = 0.5, name: str | None = None) -> EvalRow:
    """Score ``model`` on ``test``, reading the model's own input columns."""
    if test.n_rows == 0:
        raise DataError("test set is empty")
    columns = list(model.input_columns)
    if max(columns) >= test.n_features:
        raise DataError(
            f"model reads column {max(columns)} but the test set has {test.n_features} columns"
        )
    proba = model.predict_proba(test.features[:, columns])
    return score_predictions(proba > threshold, test.labels, name or model.kind, len(columns))


def write_report_csv(rows: list[EvalRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_FIELDS)
        for r in rows:
            writer.writerow([r.algorithm, r.n_features, f"{r.accuracy:.6f}", f"{r.precision:.6f}",
                             f"{r.recall:.6f}", str(r.precision_undefined).lower()])


def write_report_json(rows: list[EvalRow], path: str | Path) -> None:
    Path(path).write_text(json.dumps([asdict(r) for r in rows], indent=2) + "\n", encoding="utf-8")


def format_report(rows: list[EvalRow]) -> str:
    lines = [f"{'Algorithm':<12}{'# features':>11}{'Accuracy':>11}{'Precision':>11}{'Recall':>9}"]
    for r in rows:
        flag = " *" if r.precision_undefined else ""
        lines.append(
            f"{r.algorithm:<12}{r.n_features:>11}{r.accuracy:>11.2%}{r.precision:>11.2%}{r.recall:>9.2%}{flag}"
        )
    if any(r.precision_undefined for r in rows):
        lines.append("* no positive predictions; precision undefined")
    return "\n".join(lines)
