"""Logistic-regression and linear-SVM baselines.

Both are single affine maps ``z = X w + b`` trained with the same mini-batch
RMSProp loop as the network. The SVM minimises the mean hinge loss, with
labels in {-1, +1}, plus ``(l2_lambda / 2) * ||w||^2`` via its sub-gradient.
Its ``predict_proba`` is ``sigmoid(z)``: not a calibrated probability, but
thresholding it at 0.5 is the usual ``z > 0`` rule.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..dataio import FlowDataset
from .training import BinaryModel, TrainConfig, binary_cross_entropy, derived_seeds, sigmoid, fit_rmsprop, training_arrays

LOGISTIC_L2 = 0.0
SVM_L2 = 1e-4


class _LinearModel(BinaryModel):
    def __init__(self, n_inputs: int, params=None, l2_lambda: float = 0.0,
                 input_columns=None, feature_names=None, seed: int = 0):
        columns = range(n_inputs) if input_columns is None else input_columns
        super().__init__(l2_lambda, columns, feature_names, seed)
        if params is None:
            params = [np.zeros((n_inputs, 1)), np.zeros(1)]
        self.params = [np.array(p, dtype=np.float64) for p in params]
        if self.params[0].shape != (n_inputs, 1) or self.params[1].shape != (1,):
            raise ValueError("parameter shapes do not match the input width")
        self.weight_indices = (0,)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.input_width, 1]

    @property
    def coef(self) -> np.ndarray:
        return self.params[0][:, 0]

    @property
    def intercept(self) -> float:
        return float(self.params[1][0])

    def decision_function(self, X) -> np.ndarray:
        return (X @ self.params[0] + self.params[1])[:, 0]


class LogisticModel(_LinearModel):
    kind = "logistic"

    def loss_and_grads(self, X, y):
        z = self.decision_function(X)
        loss = binary_cross_entropy(z, y) + self.penalty()
        delta = ((sigmoid(z) - y) / X.shape[0])[:, None]
        return loss, [X.T @ delta + self.l2_lambda * self.params[0], delta.sum(axis=0)]


class LinearSvmModel(_LinearModel):
    kind = "linear_svm"

    def loss_and_grads(self, X, y):
        s = 2.0 * y - 1.0
        z = self.decision_function(X)
        slack = 1.0 - s * z
        loss = float(np.mean(np.maximum(slack, 0.0))) + self.penalty()
        delta = (np.where(slack > 0, -s, 0.0) / X.shape[0])[:, None]
        return loss, [X.T @ delta + self.l2_lambda * self.params[0], delta.sum(axis=0)]

    def hinge_loss(self, X, y) -> float:
        s = 2.0 * np.asarray(y, dtype=np.float64) - 1.0
        return float(np.mean(np.maximum(1.0 - s * self.decision_function(self._check_rows(X)), 0.0)))


def _train_linear(cls, train: FlowDataset, columns, cfg: TrainConfig, l2_lambda: float):
    columns = list(range(train.n_features)) if columns is None else list(columns)
    X, y = training_arrays(train, columns)
    _, shuffle_seed = derived_seeds(cfg.seed, 2)
    model = cls(
        X.shape[1],
        l2_lambda=l2_lambda,
        input_columns=columns,
        feature_names=[train.column_names[c] for c in columns],
        seed=cfg.seed,
    )
    return fit_rmsprop(model, X, y, cfg, shuffle_seed)


def train_logistic(train: FlowDataset, columns: Sequence[int] | None = None,
                   cfg: TrainConfig = TrainConfig(), l2_lambda: float = LOGISTIC_L2) -> LogisticModel:
    """Maximum-likelihood logistic regression from zero initial coefficients.

    ``columns=None`` uses every feature, as the benchmark protocol does.
    """
    return _train_linear(LogisticModel, train, columns, cfg, l2_lambda)


def train_linear_svm(train: FlowDataset, columns: Sequence[int] | None = None,
                     cfg: TrainConfig = TrainConfig(), l2_lambda: float = SVM_L2) -> LinearSvmModel:
    return _train_linear(LinearSvmModel, train, columns, cfg, l2_lambda)
