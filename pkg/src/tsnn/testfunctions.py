"""Closed-form response functions on [0, 1]^k with known total indices."""
from __future__ import annotations

import numpy as np

from .surrogate import AnalyticFunction


def ishigami(a: float = 7.0, b: float = 0.1) -> AnalyticFunction:
    """Ishigami function with inputs mapped from [0, 1]^3 to [-pi, pi]^3."""

    def f(x):
        z = (2.0 * x - 1.0) * np.pi
        return np.sin(z[:, 0]) + a * np.sin(z[:, 1]) ** 2 + b * z[:, 2] ** 4 * np.sin(z[:, 0])

    return AnalyticFunction(3, f, "ishigami")


def ishigami_total_indices(a: float = 7.0, b: float = 0.1) -> np.ndarray:
    pi4, pi8 = np.pi ** 4, np.pi ** 8
    v1 = 0.5 * (1.0 + b * pi4 / 5.0) ** 2
    v2 = a ** 2 / 8.0
    v13 = b ** 2 * pi8 * (1.0 / 18.0 - 1.0 / 50.0)
    total = a ** 2 / 8.0 + b * pi4 / 5.0 + b ** 2 * pi8 / 18.0 + 0.5
    return np.array([v1 + v13, v2, v13]) / total


def linear(coefficients) -> AnalyticFunction:
    c = np.asarray(coefficients, dtype=np.float64)
    return AnalyticFunction(len(c), lambda x: x @ c, "linear")


def linear_total_indices(coefficients) -> np.ndarray:
    c2 = np.asarray(coefficients, dtype=np.float64) ** 2
    return c2 / c2.sum()


def product(k: int = 2) -> AnalyticFunction:
    return AnalyticFunction(k, lambda x: np.prod(x, axis=1), "product")
