"""Classifiers for the second stage and the linear benchmarks."""
from .linear import LinearSvmModel, LogisticModel, train_linear_svm, train_logistic
from .metrics import EvalRow, evaluate, score_predictions, write_report_csv, write_report_json
from .mlp import MlpModel, train_mlp
from .serialize import ModelFileError, load_model, save_model
from .training import BinaryModel, TrainConfig, TrainingError, gradient_check, predict

__all__ = [
    "BinaryModel",
    "EvalRow",
    "LinearSvmModel",
    "LogisticModel",
    "MlpModel",
    "ModelFileError",
    "TrainConfig",
    "TrainingError",
    "evaluate",
    "gradient_check",
    "load_model",
    "predict",
    "save_model",
    "score_predictions",
    "train_linear_svm",
    "train_logistic",
    "train_mlp",
    "write_report_csv",
    "write_report_json",
]
