"""Pipeline configuration and per-stage seed derivation.

Config files are flat YAML mappings whose keys match :class:`PipelineConfig`
fields. Every run writes the fully resolved config next to its outputs, and
re-running from that file reproduces the run.

Stage seeds come from ``SeedSequence(seed).spawn(len(STAGES))`` taken in the
order of ``STAGES``, one 32-bit word per child.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
import yaml

from .dataio import DEFAULT_LABEL_COLUMN, SplitSpec, SyntheticSpec
from .models.linear import LOGISTIC_L2, SVM_L2
from .models.training import TrainConfig

STAGES = ("synthetic", "split", "sampling", "tsnn", "logistic", "svm")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    input: str | None = None
    label_column: str = DEFAULT_LABEL_COLUMN
    # used only when input is None
    synthetic_rows: int = 2000
    synthetic_features: int = 10
    synthetic_informative: tuple[int, ...] = (0, 3)
    synthetic_effect_size: float = 0.8
    synthetic_class_ratio: float = 5.0
    top_k: int = 10
    tsi_samples: int = 4096
    neighbors: int = 5
    train_fraction: float = 0.8
    epochs: int = 200
    batch_size: int = 500
    learning_rate: float = 0.001
    rms_decay: float = 0.9
    rms_epsilon: float = 1e-7
    l2_lambda: float = 1e-5
    hidden_sizes: tuple[int, ...] = (64, 32, 16, 8)
    baseline_learning_rate: float = 0.01
    logistic_l2: float = LOGISTIC_L2
    svm_l2: float = SVM_L2
    seed: int = 0
    out: str = "tsnn-out"

    def __post_init__(self):
        self.synthetic_informative = tuple(int(i) for i in self.synthetic_informative)
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        if self.top_k < 1:
            raise ConfigError("top_k must be positive")
        if self.tsi_samples < 2:
            raise ConfigError("tsi_samples must be at least 2")
        if self.neighbors < 1:
            raise ConfigError("neighbors must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    def stage_seeds(self) -> dict[str, int]:
        children = np.random.SeedSequence(self.seed).spawn(len(STAGES))
        return {name: int(c.generate_state(1)[0]) for name, c in zip(STAGES, children)}

    def split_spec(self) -> SplitSpec:
        return SplitSpec(self.train_fraction, True, self.stage_seeds()["split"])

    def synthetic_spec(self) -> SyntheticSpec:
        return SyntheticSpec(
            n_rows=self.synthetic_rows,
            n_features=self.synthetic_features,
            informative_indices=self.synthetic_informative,
            class_ratio=self.synthetic_class_ratio,
            effect_size=self.synthetic_effect_size,
            seed=self.stage_seeds()["synthetic"],
        )

    def train_config(self, stage: str = "tsnn") -> TrainConfig:
        baseline = stage != "tsnn"
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.baseline_learning_rate if baseline else self.learning_rate,
            rms_decay=self.rms_decay,
            rms_epsilon=self.rms_epsilon,
            l2_lambda=self.l2_lambda,
            hidden_sizes=self.hidden_sizes,
            seed=self.stage_seeds()[stage],
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["synthetic_informative"] = list(self.synthetic_informative)
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d

    def with_overrides(self, **overrides) -> PipelineConfig:
        d = self.to_dict()
        d.update({k: v for k, v in overrides.items() if v is not None})
        return from_mapping(d)


def from_mapping(mapping: dict) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return PipelineConfig(**mapping)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> PipelineConfig:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a key-value mapping")
    return from_mapping(data)


def save_config(cfg: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None), encoding="utf-8")
