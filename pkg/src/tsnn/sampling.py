"""Independent uniform sampling matrices for the total-index estimator.

``A`` and ``B`` come from two child streams of ``SeedSequence(seed)``
(``spawn(2)``), each driving a PCG64 generator, so the two matrices are
statistically independent and a plan is a pure function of ``(n, k, seed)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class SamplingPlan:
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def k(self) -> int:
        return self.a_matrix.shape[1]


def build_plan(n: int = DEFAULT_SAMPLES, k: int = 1, seed: int = 0) -> SamplingPlan:
    if n < 2:
        raise ValueError(f"sample count must be at least 2, got {n}")
    if k < 1:
        raise ValueError(f"feature count must be positive, got {k}")
    stream_a, stream_b = np.random.SeedSequence(seed).spawn(2)
    a = np.random.Generator(np.random.PCG64(stream_a)).random((n, k))
    b = np.random.Generator(np.random.PCG64(stream_b)).random((n, k))
    a.setflags(write=False)
    b.setflags(write=False)
    return SamplingPlan(a, b, seed)


def swap_column(plan: SamplingPlan, i: int) -> np.ndarray:
    """Copy of ``A`` whose column ``i`` is taken from ``B``."""
    if not 0 <= i < plan.k:
        raise IndexError(f"column {i} out of range for k={plan.k}")
    out = np.array(plan.a_matrix, copy=True)
    out[:, i] = plan.b_matrix[:, i]
    return out
