"""Shared model base, mini-batch RMSProp loop and finite-difference checks."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..dataio import DataError, FlowDataset, is_normalized


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 500
    learning_rate: float = 0.001
    rms_decay: float = 0.9
    rms_epsilon: float = 1e-7
    l2_lambda: float = 1e-5
    hidden_sizes: tuple[int, ...] = (64, 32, 16, 8)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0 < self.rms_decay < 1:
            raise ValueError("rms_decay must lie in (0, 1)")
        if not self.rms_epsilon > 0:
            raise ValueError("rms_epsilon must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d


def sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form: overflow-free and exactly 0.5 at 0
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def binary_cross_entropy(logits: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


class BinaryModel:
    """Common surface of the three classifiers.

    Subclasses define ``params`` (list of arrays, weights before biases per
    layer), ``weight_indices`` (positions of penalised matrices),
    ``decision_function`` and ``loss_and_grads``.
    """

    kind = "model"

    def __init__(self, l2_lambda: float, input_columns, feature_names=None, seed: int = 0):
        self.l2_lambda = float(l2_lambda)
        self.input_columns = tuple(int(c) for c in input_columns)
        self.feature_names = tuple(feature_names) if feature_names is not None else None
        self.seed = int(seed)
        self.loss_history: list[float] = []
        self.config: TrainConfig | None = None

    params: list[np.ndarray]
    weight_indices: tuple[int, ...]

    @property
    def input_width(self) -> int:
        return self.params[0].shape[0]

    def _check_rows(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.input_width:
            raise ValueError(
                f"model expects {self.input_width} input columns, got shape {rows.shape}"
            )
        return rows

    def penalty(self) -> float:
        return 0.5 * self.l2_lambda * sum(float(np.sum(self.params[i] ** 2)) for i in self.weight_indices)

    def loss(self, X, y) -> float:
        return self.loss_and_grads(X, y)[0]

    def predict_proba(self, rows) -> np.ndarray:
        return sigmoid(self.decision_function(self._check_rows(rows)))

    def weight_norm(self) -> float:
        return math.sqrt(sum(float(np.sum(self.params[i] ** 2)) for i in self.weight_indices))


def predict(model: BinaryModel, rows) -> np.ndarray:
    return model.predict_proba(rows)


def training_arrays(train: FlowDataset, columns) -> tuple[np.ndarray, np.ndarray]:
    columns = list(columns)
    if not columns:
        raise DataError("at least one input column is required")
    if not all(0 <= c < train.n_features for c in columns):
        raise DataError(f"column indices {columns} outside [0, {train.n_features})")
    n_benign, n_attack = train.class_counts()
    if n_benign == 0 or n_attack == 0:
        raise DataError("training data contains a single class")
    X = train.features[:, columns]
    if not is_normalized(X):
        raise DataError("training features must be normalized to [0, 1]")
    return np.array(X), train.labels.astype(np.float64)


def fit_rmsprop(model: BinaryModel, X: np.ndarray, y: np.ndarray, cfg: TrainConfig, shuffle_seed) -> BinaryModel:
    """Mini-batch RMSProp on ``model.loss_and_grads``; the last short batch is kept.

    ``model.loss_history`` receives the full-data regularised loss after
    every epoch.
    """
    rng = np.random.default_rng(shuffle_seed)
    n = X.shape[0]
    batch = min(cfg.batch_size, n)
    cache = [np.zeros_like(p) for p in model.params]
    model.loss_history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for b, start in enumerate(range(0, n, batch)):
            idx = order[start:start + batch]
            loss, grads = model.loss_and_grads(X[idx], y[idx])
            if not math.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch + 1}, batch {b + 1}")
            for p, g, s in zip(model.params, grads, cache):
                s *= cfg.rms_decay
                s += (1.0 - cfg.rms_decay) * g * g
                p -= cfg.learning_rate * g / (np.sqrt(s) + cfg.rms_epsilon)
        full = model.loss(X, y)
        if not math.isfinite(full):
            raise TrainingError(f"non-finite loss after epoch {epoch + 1}")
        model.loss_history.append(full)
    model.config = cfg
    return model


def gradient_check(model: BinaryModel, X, y, step: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Covers every parameter of the regularised loss. The relative error of an
    entry is ``|g - g_fd| / max(|g| + |g_fd|, 1e-6)``: below 1e-6 the
    central difference is dominated by rounding in the loss, so such entries
    are judged on absolute error instead.
    """
    X = model._check_rows(X)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] > 32:
        raise ValueError("gradient_check expects at most 32 rows")
    _, grads = model.loss_and_grads(X, y)
    worst = 0.0
    for p, g in zip(model.params, grads):
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for j in range(flat.size):
            saved = flat[j]
            flat[j] = saved + step
            up = model.loss(X, y)
            flat[j] = saved - step
            down = model.loss(X, y)
            flat[j] = saved
            numeric = (up - down) / (2.0 * step)
            err = abs(gflat[j] - numeric) / max(abs(gflat[j]) + abs(numeric), 1e-6)
            worst = max(worst, err)
    return worst


def derived_seeds(seed: int, count: int) -> list[int]:
    """``count`` independent 32-bit seeds from ``SeedSequence(seed).spawn``."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


__all__ = [
    "TrainConfig",
    "TrainingError",
    "BinaryModel",
    "predict",
    "fit_rmsprop",
    "gradient_check",
    "sigmoid",
    "binary_cross_entropy",
    "derived_seeds",
    "training_arrays",
]
