"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
under "acceptance criteria".
"""
import os
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from oracles import grid_total_indices, piecewise_constant
from tsnn import cli, dataio, surrogate
from tsnn import testfunctions as tf
from tsnn.config import PipelineConfig
from tsnn.dataio import SyntheticSpec
from tsnn.models import LinearSvmModel, LogisticModel, MlpModel, gradient_check
from tsnn.sampling import build_plan
from tsnn.sensitivity import estimate_tsi, rank_features, select_top
from tsnn.surrogate import AnalyticFunction

N = 2 ** 14
TOL = 0.02
SEED = 42
ISHIGAMI_TOTALS = np.array([0.5576, 0.4424, 0.2437])


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    assert ok, line


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def fmt(values) -> str:
    return "(" + ", ".join(f"{v:.4f}" for v in np.atleast_1d(values)) + ")"


def test_criterion_01_ishigami():
    report, secs = timed(lambda: estimate_tsi(tf.ishigami(7.0, 0.1), build_plan(N, 3, SEED)))
    err = np.abs(report.tsi - ISHIGAMI_TOTALS).max()
    record(1, "Ishigami totals", err <= TOL and secs < 10,
           f"S_T={fmt(report.tsi)} max err {err:.4f} (tol {TOL}), {secs:.2f}s (limit 10s)")


def test_criterion_02_additive_linear():
    report, secs = timed(lambda: estimate_tsi(tf.linear([2.0, 1.0]), build_plan(N, 2, SEED)))
    err = np.abs(report.tsi - [0.8, 0.2]).max()
    record(2, "additive linear", err <= TOL and secs < 5,
           f"S_T={fmt(report.tsi)} max err {err:.4f} (tol {TOL}), {secs:.2f}s (limit 5s)")


def test_criterion_03_interaction():
    report = estimate_tsi(tf.product(2), build_plan(N, 2, SEED))
    err = abs(report.tsi[0] - 4 / 7)
    record(3, "x1*x2 interaction", err <= TOL, f"S_T1={report.tsi[0]:.4f} vs 4/7, err {err:.4f} (tol {TOL})")


def test_criterion_04_ignored_feature():
    f = AnalyticFunction(3, lambda x: np.sin(6 * x[:, 0]) + x[:, 2] ** 2)
    report = estimate_tsi(f, build_plan(N, 3, SEED))
    record(4, "ignored feature null", abs(report.tsi[1]) <= TOL,
           f"|S_T2|={abs(report.tsi[1]):.4f} (tol {TOL})")


def recovers_informative(seed: int) -> bool:
    ds = dataio.generate_synthetic(SyntheticSpec(600, 10, (0, 3), 5.0, 0.8, seed))
    f = surrogate.fit(dataio.fit_normalize(ds))
    report = estimate_tsi(f, build_plan(4096, 10, seed), ds.column_names)
    return set(select_top(rank_features(report), 2)) == {0, 3}


def test_criterion_05_selection_recovery():
    hits, secs = timed(lambda: sum(recovers_informative(s) for s in range(10)))
    record(5, "selection recovery", hits >= 9 and secs < 30,
           f"{hits}/10 seeds put both informative columns in the top 2 (need 9), {secs:.1f}s (limit 30s)")


@pytest.fixture(scope="module")
def benchmark_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("bench")
    runs = []
    for name in ("first", "second"):
        cfg = PipelineConfig(synthetic_rows=2000, top_k=2, seed=SEED, out=str(root / name))
        rows, secs = timed(lambda: cli.cmd_pipeline(cfg))
        runs.append((Path(cfg.out), {r.algorithm: r for r in rows}, secs))
    return runs


def test_criterion_06_benchmark_ordering(benchmark_runs):
    _, rows, secs = benchmark_runs[0]
    tsnn, lr, svm = rows["TSNN"].accuracy, rows["LR"].accuracy, rows["SVM"].accuracy
    ok = tsnn >= 0.99 and tsnn >= lr and tsnn >= svm and secs < 300
    record(6, "benchmark ordering", ok,
           f"TSNN {tsnn:.4f} (need >= 0.99), LR {lr:.4f}, SVM {svm:.4f}, {secs:.1f}s (limit 300s)")


def test_criterion_07_gradient_correctness():
    rng = np.random.default_rng(SEED)
    X = rng.random((32, 10))
    y = (rng.random(32) > 0.5).astype(float)
    models = {
        "MLP": MlpModel([10, 64, 32, 16, 8, 1], l2_lambda=1e-5, seed=SEED),
        "LR": LogisticModel(10, params=[rng.normal(size=(10, 1)), rng.normal(size=1)]),
        "SVM": LinearSvmModel(10, params=[rng.normal(size=(10, 1)), rng.normal(size=1)], l2_lambda=1e-4),
    }
    errors = {name: gradient_check(m, X, y) for name, m in models.items()}
    detail = ", ".join(f"{k} {v:.2e}" for k, v in errors.items())
    record(7, "gradient check", max(errors.values()) < 1e-4, f"max rel err {detail} (limit 1e-4)")


def test_criterion_08_determinism(benchmark_runs):
    (a, _, _), (b, _, _) = benchmark_runs
    names = [cli.RANKING_CSV, cli.RANKING_JSON, cli.EVALUATION_CSV, cli.EVALUATION_JSON]
    differing = [n for n in names if (a / n).read_bytes() != (b / n).read_bytes()]
    record(8, "pipeline determinism", not differing,
           "ranking and evaluation reports byte-identical" if not differing else f"differ: {differing}")


def test_criterion_09_piecewise_constant():
    table = np.random.default_rng(SEED).random((8, 8))
    expected = grid_total_indices(table)
    report = estimate_tsi(AnalyticFunction(2, piecewise_constant(table)), build_plan(N, 2, SEED))
    err = np.abs(report.tsi - expected).max()
    record(9, "estimator vs exhaustive grid", err <= TOL,
           f"S_T={fmt(report.tsi)} exhaustive={fmt(expected)} err {err:.4f} (tol {TOL})")


EXTERNAL_CSV = os.environ.get("TSNN_CICIDS_CSV")


@pytest.mark.slow
def test_criterion_10_external_data(tmp_path):
    if not EXTERNAL_CSV:
        ACCEPTANCE_RESULTS.append("[SKIP] 10. external CSE-CIC data: set TSNN_CICIDS_CSV to run (not gating)")
        pytest.skip("set TSNN_CICIDS_CSV to a CSE-CIC DDoS flow CSV")
    full = dataio.load_csv(EXTERNAL_CSV, os.environ.get("TSNN_LABEL_COLUMN", "Label"))
    sample_path = tmp_path / "sample.csv"
    dataio.write_csv(dataio.stratified_sample(full, 6000, 5.0, seed=SEED), sample_path)
    rows = cli.cmd_pipeline(PipelineConfig(input=str(sample_path), seed=SEED, out=str(tmp_path / "out")))
    tsnn = rows[0].accuracy
    record(10, "external CSE-CIC data", tsnn >= 0.99, f"TSNN held-out accuracy {tsnn:.4f} (need >= 0.99)")
