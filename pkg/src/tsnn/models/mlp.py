"""Five-layer ReLU network with a sigmoid output, trained on binary cross-entropy."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..dataio import FlowDataset
from .training import BinaryModel, TrainConfig, binary_cross_entropy, derived_seeds, sigmoid, fit_rmsprop, training_arrays

N_WEIGHT_LAYERS = 5


class MlpModel(BinaryModel):
    kind = "mlp"

    def __init__(self, layer_sizes: Sequence[int], params=None, l2_lambda: float = 1e-5,
                 input_columns=None, feature_names=None, seed: int = 0):
        layer_sizes = [int(s) for s in layer_sizes]
        if len(layer_sizes) != N_WEIGHT_LAYERS + 1:
            raise ValueError(f"need {N_WEIGHT_LAYERS + 1} layer sizes (input, 4 hidden, output), got {layer_sizes}")
        if layer_sizes[-1] != 1 or min(layer_sizes) < 1:
            raise ValueError(f"invalid layer sizes {layer_sizes}")
        columns = range(layer_sizes[0]) if input_columns is None else input_columns
        super().__init__(l2_lambda, columns, feature_names, seed)
        self.layer_sizes = layer_sizes
        if params is None:
            params = init_params(layer_sizes, seed)
        self.params = [np.array(p, dtype=np.float64) for p in params]
        for layer, (fan_in, fan_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
            if self.params[2 * layer].shape != (fan_in, fan_out) or self.params[2 * layer + 1].shape != (fan_out,):
                raise ValueError(f"parameter shapes do not match layer {layer}")
        self.weight_indices = tuple(range(0, 2 * N_WEIGHT_LAYERS, 2))

    def _forward(self, X):
        activations = [X]
        h = X
        for layer in range(N_WEIGHT_LAYERS - 1):
            h = np.maximum(h @ self.params[2 * layer] + self.params[2 * layer + 1], 0.0)
            activations.append(h)
        logits = h @ self.params[-2] + self.params[-1]
        return activations, logits[:, 0]

    def decision_function(self, X) -> np.ndarray:
        return self._forward(X)[1]

    def loss_and_grads(self, X, y):
        activations, logits = self._forward(X)
        loss = binary_cross_entropy(logits, y) + self.penalty()
        p = sigmoid(logits)
        delta = ((p - y) / X.shape[0])[:, None]
        grads = [None] * len(self.params)
        for layer in reversed(range(N_WEIGHT_LAYERS)):
            W = self.params[2 * layer]
            grads[2 * layer] = activations[layer].T @ delta + self.l2_lambda * W
            grads[2 * layer + 1] = delta.sum(axis=0)
            if layer:
                delta = (delta @ W.T) * (activations[layer] > 0)
        return loss, grads


def init_params(layer_sizes: Sequence[int], seed: int) -> list[np.ndarray]:
    """Uniform weights with variance ``1 / fan_in`` and zero biases."""
    rng = np.random.default_rng(seed)
    params = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(3.0 / fan_in)
        params.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def train_mlp(train: FlowDataset, selected: Sequence[int], cfg: TrainConfig = TrainConfig()) -> MlpModel:
    X, y = training_arrays(train, selected)
    init_seed, shuffle_seed = derived_seeds(cfg.seed, 2)
    if len(cfg.hidden_sizes) != N_WEIGHT_LAYERS - 1:
        raise ValueError(f"need {N_WEIGHT_LAYERS - 1} hidden widths, got {cfg.hidden_sizes}")
    sizes = [X.shape[1], *cfg.hidden_sizes, 1]
    model = MlpModel(
        sizes,
        params=init_params(sizes, init_seed),
        l2_lambda=cfg.l2_lambda,
        input_columns=selected,
        feature_names=[train.column_names[c] for c in selected],
        seed=cfg.seed,
    )
    return fit_rmsprop(model, X, y, cfg, shuffle_seed)
