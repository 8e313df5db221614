"""Flow-record ingestion, min-max scaling, stratified splitting and synthetic data.

Every random draw in this module goes through ``numpy.random.default_rng``
(the PCG64 bit generator seeded via ``SeedSequence``), so results are
reproducible across platforms for a given seed.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

DEFAULT_LABEL_COLUMN = "Label"
BENIGN_LABEL = "BENIGN"
ATTACK_LABEL = "DDoS"


class DataError(ValueError):
    """Raised for malformed or unusable input data."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FlowDataset:
    """Feature matrix, binary labels (0 benign, 1 DDoS) and column names.

    ``scaling`` holds one ``(min, max)`` row per column once the dataset has
    been produced by :func:`fit_normalize` or :func:`apply_scaling`.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: tuple[str, ...]
    scaling: np.ndarray | None = field(default=None)

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {features.shape}")
        labels = np.asarray(self.labels).astype(np.int64)
        if labels.shape != (features.shape[0],):
            raise DataError(
                f"{features.shape[0]} feature rows but {labels.shape[0]} labels"
            )
        if not np.isin(labels, (0, 1)).all():
            raise DataError("labels must be 0 (benign) or 1 (DDoS)")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != features.shape[1]:
            raise DataError(
                f"{len(names)} column names for {features.shape[1]} feature columns"
            )
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "column_names", names)
        if self.scaling is not None:
            scaling = np.asarray(self.scaling, dtype=np.float64)
            if scaling.shape != (features.shape[1], 2):
                raise DataError(f"scaling must have shape ({features.shape[1]}, 2)")
            object.__setattr__(self, "scaling", _frozen(scaling))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        n_attack = int(self.labels.sum())
        return self.n_rows - n_attack, n_attack

    def take(self, rows: np.ndarray) -> FlowDataset:
        """Row subset, keeping columns and scaling."""
        rows = np.asarray(rows, dtype=np.intp)
        return FlowDataset(self.features[rows], self.labels[rows], self.column_names, self.scaling)

    def select_columns(self, columns: Sequence[int]) -> FlowDataset:
        columns = list(columns)
        scaling = None if self.scaling is None else self.scaling[columns]
        return FlowDataset(
            self.features[:, columns],
            self.labels,
            tuple(self.column_names[c] for c in columns),
            scaling,
        )


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    stratified: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DataError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a labelled dataset with known informative columns.

    Informative columns draw a uniform value of width ``1 - effect_size``;
    benign rows start at 0 and DDoS rows are the same draw shifted up by
    ``effect_size``. With ``effect_size == 0`` both classes are uniform on
    [0, 1] and labels carry no signal; from 0.5 upward the classes no longer
    overlap on any informative column.
    """

    n_rows: int = 600
    n_features: int = 10
    informative_indices: tuple[int, ...] = (0, 3)
    class_ratio: float = 5.0
    effect_size: float = 0.8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "informative_indices", tuple(sorted(set(int(i) for i in self.informative_indices))))
        if self.n_rows < 2:
            raise DataError("n_rows must be at least 2")
        if self.n_features < 1:
            raise DataError("n_features must be positive")
        if not self.informative_indices:
            raise DataError("at least one informative column is required")
        if not all(0 <= i < self.n_features for i in self.informative_indices):
            raise DataError(
                f"informative indices {self.informative_indices} outside [0, {self.n_features})"
            )
        if not self.class_ratio > 0:
            raise DataError("class_ratio must be positive")
        if not 0.0 <= self.effect_size < 1.0:
            raise DataError(f"effect_size must lie in [0, 1), got {self.effect_size}")

    def class_sizes(self) -> tuple[int, int]:
        n_attack = int(math.floor(self.n_rows / (1.0 + self.class_ratio) + 0.5))
        n_attack = min(max(n_attack, 1), self.n_rows - 1)
        return self.n_rows - n_attack, n_attack


def map_label(value: str) -> int:
    return 0 if value.strip().lower() == "benign" else 1


def _is_finite_number(text: str) -> bool:
    try:
        return math.isfinite(float(text))
    except ValueError:
        return False


def load_csv(path: str | Path, label_column: str = DEFAULT_LABEL_COLUMN) -> FlowDataset:
    """Read a flow CSV; every non-label column must be a finite number.

    Header names are stripped of surrounding whitespace (CICIDS exports pad
    them). Row numbers in error messages count data rows from 1.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise DataError(f"{path}: file is empty") from None
    frame.columns = [str(c).strip() for c in frame.columns]
    if label_column not in frame.columns:
        raise DataError(f"{path}: label column {label_column!r} not found")
    if frame.empty:
        raise DataError(f"{path}: no data rows")

    raw_labels = frame.pop(label_column)
    blank = raw_labels.str.strip() == ""
    if blank.any():
        row = int(np.flatnonzero(blank.to_numpy())[0]) + 1
        raise DataError(f"{path}: empty label at row {row}")
    labels = np.array([map_label(v) for v in raw_labels], dtype=np.int64)

    columns = []
    for name in frame.columns:
        cells = frame[name].tolist()
        try:
            # float() is correctly rounded, unlike pandas' fast parser
            values = np.array([float(c) for c in cells], dtype=np.float64)
            bad = ~np.isfinite(values)
        except ValueError:
            bad = np.array([not _is_finite_number(c) for c in cells])
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DataError(
                f"{path}: non-numeric or non-finite value {cells[row]!r} "
                f"at row {row + 1}, column {name!r}"
            )
        columns.append(values)
    if not columns:
        raise DataError(f"{path}: no feature columns")
    return FlowDataset(np.column_stack(columns), labels, tuple(frame.columns))


def write_csv(ds: FlowDataset, path: str | Path, label_column: str = DEFAULT_LABEL_COLUMN) -> None:
    """Write ``ds`` in the same layout :func:`load_csv` reads.

    Floats are written with ``repr`` so a load after write is exact.
    """
    if label_column in ds.column_names:
        raise DataError(f"label column {label_column!r} collides with a feature name")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*ds.column_names, label_column])
        for row, label in zip(ds.features.tolist(), ds.labels.tolist()):
            writer.writerow([repr(v) for v in row] + [ATTACK_LABEL if label else BENIGN_LABEL])


def _scale(features: np.ndarray, scaling: np.ndarray) -> np.ndarray:
    lo, hi = scaling[:, 0], scaling[:, 1]
    span = hi - lo
    constant = span == 0
    out = (features - lo) / np.where(constant, 1.0, span)
    out[:, constant] = 0.0
    return out


def fit_normalize(ds: FlowDataset) -> FlowDataset:
    """Min-max scale each column to [0, 1]; constant columns become all zeros."""
    if ds.n_rows < 2:
        raise DataError("normalization needs at least 2 rows")
    scaling = np.column_stack([ds.features.min(axis=0), ds.features.max(axis=0)])
    return FlowDataset(_scale(ds.features, scaling), ds.labels, ds.column_names, scaling)


def apply_scaling(ds: FlowDataset, scaling: np.ndarray) -> FlowDataset:
    """Transform held-out rows with training-set scaling, clipping into [0, 1]."""
    scaling = np.asarray(scaling, dtype=np.float64)
    if scaling.shape != (ds.n_features, 2):
        raise DataError(f"scaling has shape {scaling.shape}, expected ({ds.n_features}, 2)")
    scaled = np.clip(_scale(ds.features, scaling), 0.0, 1.0)
    return FlowDataset(scaled, ds.labels, ds.column_names, scaling)


def is_normalized(features: np.ndarray) -> bool:
    return bool(features.size == 0 or (features.min() >= 0.0 and features.max() <= 1.0))


def split_indices(labels: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/test row indices, each returned in ascending order.

    With ``spec.stratified`` every class present contributes
    ``round(train_fraction * class_size)`` rows to the training part, kept
    within ``[1, class_size - 1]`` so both parts see the class.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        groups = [np.flatnonzero(labels == c) for c in np.unique(labels)]
        for c, idx in zip(np.unique(labels), groups):
            if idx.size < 2:
                raise DataError(f"class {int(c)} has {idx.size} sample(s); need at least 2 to split")
    else:
        if labels.size < 2:
            raise DataError("need at least 2 rows to split")
        groups = [np.arange(labels.size)]
    train, test = [], []
    for idx in groups:
        perm = rng.permutation(idx)
        n_train = int(math.floor(spec.train_fraction * idx.size + 0.5))
        n_train = min(max(n_train, 1), idx.size - 1)
        train.append(perm[:n_train])
        test.append(perm[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_split(ds: FlowDataset, spec: SplitSpec = SplitSpec()) -> tuple[FlowDataset, FlowDataset]:
    train, test = split_indices(ds.labels, spec)
    return ds.take(train), ds.take(test)


def stratified_sample(ds: FlowDataset, n_rows: int, class_ratio: float = 5.0, seed: int = 0) -> FlowDataset:
    """Draw ``n_rows`` rows without replacement at ``class_ratio`` benign per attack."""
    n_attack = int(math.floor(n_rows / (1.0 + class_ratio) + 0.5))
    wanted = {0: n_rows - n_attack, 1: n_attack}
    rng = np.random.default_rng(seed)
    picked = []
    for c, n in wanted.items():
        idx = np.flatnonzero(ds.labels == c)
        if idx.size < n:
            raise DataError(f"class {c} has {idx.size} rows; sample needs {n}")
        picked.append(rng.choice(idx, size=n, replace=False))
    return ds.take(np.sort(np.concatenate(picked)))


def kfold_indices(labels: np.ndarray, n_folds: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold (train, validation) index pairs.

    Each class is shuffled and dealt round-robin into folds, so fold class
    counts differ by at most one.
    """
    labels = np.asarray(labels)
    if n_folds < 2:
        raise DataError("n_folds must be at least 2")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.size, dtype=np.intp)
    offset = 0
    for c in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == c))
        fold_of[idx] = (np.arange(idx.size) + offset) % n_folds
        offset += idx.size
    return [
        (np.flatnonzero(fold_of != f), np.flatnonzero(fold_of == f))
        for f in range(n_folds)
    ]


def generate_synthetic(spec: SyntheticSpec) -> FlowDataset:
    rng = np.random.default_rng(spec.seed)
    n_benign, n_attack = spec.class_sizes()
    labels = np.concatenate([np.zeros(n_benign, np.int64), np.ones(n_attack, np.int64)])
    features = rng.random((spec.n_rows, spec.n_features))
    width = 1.0 - spec.effect_size
    for col in spec.informative_indices:
        draw = rng.random(spec.n_rows) * width
        features[:, col] = draw + spec.effect_size * labels
    order = rng.permutation(spec.n_rows)
    names = tuple(f"f{i}" for i in range(spec.n_features))
    return FlowDataset(features[order], labels[order], names)
