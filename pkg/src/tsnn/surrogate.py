"""Evaluable response functions on the unit hypercube.

The estimator only needs an object with ``k`` and ``evaluate_batch(points)``.
:class:`KnnSurrogate` builds one from labelled data; :class:`AnalyticFunction`
wraps closed-form test functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .dataio import DataError, FlowDataset, is_normalized

DEFAULT_NEIGHBORS = 5
# rows of queries per distance block; bounds memory at _CHUNK * m floats
_CHUNK = 512


class ResponseFunction(Protocol):
    k: int

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class AnalyticFunction:
    k: int
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "analytic"

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        points = _check_points(points, self.k)
        return np.asarray(self.func(points), dtype=np.float64).reshape(points.shape[0])


def _check_points(points: np.ndarray, k: int) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != k:
        raise ValueError(f"expected an (n, {k}) matrix, got shape {points.shape}")
    return points


@dataclass(frozen=True)
class KnnSurrogate:
    """Mean label of the nearest reference rows (Euclidean distance).

    Distance ties are resolved in favour of the lower reference row index.
    """

    reference_points: np.ndarray
    reference_values: np.ndarray
    neighbor_count: int = DEFAULT_NEIGHBORS

    @property
    def k(self) -> int:
        return self.reference_points.shape[1]

    @property
    def m(self) -> int:
        return self.reference_points.shape[0]

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        points = _check_points(points, self.k)
        out = np.empty(points.shape[0])
        for start in range(0, points.shape[0], _CHUNK):
            out[start:start + _CHUNK] = self._evaluate_chunk(points[start:start + _CHUNK])
        return out

    def _evaluate_chunk(self, queries: np.ndarray) -> np.ndarray:
        refs, values, nn = self.reference_points, self.reference_values, self.neighbor_count
        if nn == refs.shape[0]:
            return np.full(queries.shape[0], values.sum() / nn)
        # Screen with the BLAS expansion |q|^2 + |r|^2 - 2 q.r. If every entry is within
        # delta of the exact distance, then everything within the exact k-th distance lies
        # within screen_kth + 2 delta, so the exact pass below sees every neighbour and tie.
        qn = np.einsum("ij,ij->i", queries, queries)
        rn = np.einsum("ij,ij->i", refs, refs)
        approx = qn[:, None] + rn[None, :] - 2.0 * (queries @ refs.T)
        delta = 4.0 * (self.k + 2) * np.finfo(np.float64).eps * (qn.max() + rn.max() + 1.0)
        kth = np.partition(approx, nn - 1, axis=1)[:, nn - 1, None]
        rows, cols = np.nonzero(approx <= kth + 2.0 * delta)
        # exact distances, accumulated per column so each pair is computed identically in any batch
        dist = np.zeros(rows.size)
        for j in range(self.k):
            dist += (queries[rows, j] - refs[cols, j]) ** 2
        order = np.lexsort((cols, dist, rows))
        rows, cols = rows[order], cols[order]
        first = np.searchsorted(rows, np.arange(queries.shape[0]))
        rank = np.arange(rows.size) - first[rows]
        keep = rank < nn
        return np.bincount(rows[keep], weights=values[cols[keep]], minlength=queries.shape[0]) / nn

def fit(ds: FlowDataset, neighbor_count: int = DEFAULT_NEIGHBORS) -> KnnSurrogate:
    """Store normalized rows and their labels as kNN references."""
    if not is_normalized(ds.features):
        raise DataError("surrogate needs features normalized to [0, 1]")
    if not 1 <= neighbor_count <= ds.n_rows:
        raise ValueError(f"neighbor_count must lie in [1, {ds.n_rows}], got {neighbor_count}")
    points = np.array(ds.features, copy=True)
    values = ds.labels.astype(np.float64)
    points.setflags(write=False)
    values.setflags(write=False)
    return KnnSurrogate(points, values, neighbor_count)
