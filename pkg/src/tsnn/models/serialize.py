"""JSON model files.

A file records the model kind, layer sizes, every parameter array as shape
plus row-major values, the regulariser, seed, training config, the dataset
columns the model reads and (optionally) the min-max scaling of those
columns. Floats are stored via ``repr`` so loading reproduces predictions
bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linear import LinearSvmModel, LogisticModel
from .mlp import MlpModel
from .training import BinaryModel, TrainConfig

FORMAT = "tsnn-model"
VERSION = 1
_KINDS = {cls.kind: cls for cls in (MlpModel, LogisticModel, LinearSvmModel)}


class ModelFileError(ValueError):
    pass


def model_to_dict(model: BinaryModel, scaling=None) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "layer_sizes": list(model.layer_sizes),
        "l2_lambda": model.l2_lambda,
        "seed": model.seed,
        "config": model.config.to_dict() if model.config is not None else None,
        "input_columns": list(model.input_columns),
        "feature_names": list(model.feature_names) if model.feature_names is not None else None,
        "scaling": None if scaling is None else np.asarray(scaling, dtype=np.float64).tolist(),
        "params": [{"shape": list(p.shape), "values": p.reshape(-1).tolist()} for p in model.params],
    }


def model_from_dict(d: dict) -> tuple[BinaryModel, np.ndarray | None]:
    if d.get("format") != FORMAT:
        raise ModelFileError("not a tsnn model file")
    if d.get("version") != VERSION:
        raise ModelFileError(f"unsupported model file version {d.get('version')}")
    try:
        cls = _KINDS[d["kind"]]
        params = [np.array(p["values"], dtype=np.float64).reshape(p["shape"]) for p in d["params"]]
        common = dict(params=params, l2_lambda=d["l2_lambda"], input_columns=d["input_columns"],
                      feature_names=d["feature_names"], seed=d["seed"])
        if cls is MlpModel:
            model = MlpModel(d["layer_sizes"], **common)
        else:
            model = cls(d["layer_sizes"][0], **common)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from None
    if d.get("config") is not None:
        model.config = TrainConfig(**d["config"])
    scaling = None if d.get("scaling") is None else np.asarray(d["scaling"], dtype=np.float64)
    return model, scaling


def save_model(model: BinaryModel, path: str | Path, scaling=None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, scaling), indent=1) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[BinaryModel, np.ndarray | None]:
    """Return the model and the stored scaling (``None`` if absent)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ModelFileError(f"{path}: not a tsnn model file")
    return model_from_dict(data)
