"""Total sensitivity indices by Monte Carlo variance decomposition.

For each feature ``i`` the estimator compares ``f(A)`` with ``f(A_B^(i))``,
where the two inputs share every column except ``i``. Their mean product
(after removing the pooled mean ``f0``) estimates ``Var(E[Y | X_~i])`` and

    S_Ti = 1 - Var(E[Y | X_~i]) / V(Y)

Exactly ``k + 2`` batch evaluations of ``f`` are made.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .sampling import SamplingPlan, swap_column
from .surrogate import ResponseFunction

log = logging.getLogger(__name__)

DEGENERATE_VARIANCE = 1e-12


@dataclass(frozen=True)
class SensitivityReport:
    tsi: np.ndarray
    f0: float
    total_variance: float
    n: int
    seed: int
    column_names: tuple[str, ...]
    degenerate: bool = False

    @property
    def k(self) -> int:
        return len(self.tsi)

    def to_dict(self) -> dict:
        return {
            "tsi": [float(v) for v in self.tsi],
            "f0": float(self.f0),
            "total_variance": float(self.total_variance),
            "n": int(self.n),
            "seed": int(self.seed),
            "column_names": list(self.column_names),
            "degenerate": bool(self.degenerate),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SensitivityReport:
        return cls(
            tsi=np.asarray(d["tsi"], dtype=np.float64),
            f0=d["f0"],
            total_variance=d["total_variance"],
            n=d["n"],
            seed=d["seed"],
            column_names=tuple(d["column_names"]),
            degenerate=d["degenerate"],
        )


@dataclass(frozen=True)
class RankedFeature:
    rank: int
    column_index: int
    column_name: str
    tsi_score: float


FeatureRanking = list[RankedFeature]


def estimate_tsi(
    f: ResponseFunction,
    plan: SamplingPlan,
    column_names: Sequence[str] | None = None,
) -> SensitivityReport:
    """Estimate the total index of every input of ``f`` on ``plan``.

    ``f0`` and ``V(Y)`` come from the pooled ``f(A)``, ``f(B)`` sample
    (population variance). Outputs are centred on ``f0`` before the product
    mean is taken; this leaves the estimand unchanged and makes the indices
    exactly invariant to ``f -> c * f + d``. Estimates are not clipped.
    """
    if f.k != plan.k:
        raise ValueError(f"function takes {f.k} inputs but the plan has {plan.k} columns")
    names = tuple(column_names) if column_names is not None else tuple(f"x{i + 1}" for i in range(plan.k))
    if len(names) != plan.k:
        raise ValueError(f"{len(names)} column names for {plan.k} columns")

    y_a = f.evaluate_batch(plan.a_matrix)
    y_b = f.evaluate_batch(plan.b_matrix)
    pooled = np.concatenate([y_a, y_b])
    f0 = float(pooled.mean())
    total_variance = float(np.mean((pooled - f0) ** 2))

    if total_variance < DEGENERATE_VARIANCE:
        log.warning("output variance %.3g below %.0e; all total indices set to 0", total_variance, DEGENERATE_VARIANCE)
        return SensitivityReport(np.zeros(plan.k), f0, total_variance, plan.n, plan.seed, names, degenerate=True)

    centred_a = y_a - f0
    tsi = np.empty(plan.k)
    for i in range(plan.k):
        y_swap = f.evaluate_batch(swap_column(plan, i))
        conditional_variance = np.mean(centred_a * (y_swap - f0))
        tsi[i] = 1.0 - conditional_variance / total_variance
    return SensitivityReport(tsi, f0, total_variance, plan.n, plan.seed, names)


def rank_features(report: SensitivityReport) -> FeatureRanking:
    """Order features by total index, negative estimates shown as 0.

    Ties (including several clamped negatives) keep ascending column order.
    """
    shown = np.maximum(report.tsi, 0.0)
    order = sorted(range(report.k), key=lambda i: (-shown[i], i))
    return [
        RankedFeature(rank, i, report.column_names[i], float(shown[i]))
        for rank, i in enumerate(order, start=1)
    ]


def select_top(ranking: FeatureRanking, top_k: int) -> list[int]:
    if not 1 <= top_k <= len(ranking):
        raise ValueError(f"top_k must lie in [1, {len(ranking)}], got {top_k}")
    return [r.column_index for r in ranking[:top_k]]


def ranking_rows(ranking: FeatureRanking, top_k: int | None = None) -> list[dict]:
    rows = ranking if top_k is None else ranking[:top_k]
    return [{"rank": r.rank, "TSI": f"{r.tsi_score:.4f}", "feature": r.column_name} for r in rows]


def write_ranking_csv(ranking: FeatureRanking, path: str | Path, top_k: int | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["rank", "TSI", "feature"])
        writer.writeheader()
        writer.writerows(ranking_rows(ranking, top_k))


def write_ranking_json(ranking: FeatureRanking, path: str | Path, top_k: int | None = None) -> None:
    rows = [
        {"rank": r["rank"], "TSI": float(r["TSI"]), "feature": r["feature"]}
        for r in ranking_rows(ranking, top_k)
    ]
    Path(path).write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")


def format_ranking(ranking: FeatureRanking, top_k: int | None = None) -> str:
    rows = ranking_rows(ranking, top_k)
    width = max([len("feature")] + [len(r["feature"]) for r in rows])
    lines = [f"{'rank':>4}  {'TSI':>7}  {'feature':<{width}}"]
    lines += [f"{r['rank']:>4}  {r['TSI']:>7}  {r['feature']:<{width}}" for r in rows]
    return "\n".join(lines)
