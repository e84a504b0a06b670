"""Analytic test functions for validating the optimizers.

All three have documented global minima: sphere and rastrigin are 0 at the
origin, rosenbrock is 0 at the all-ones point.
"""
from __future__ import annotations

import numpy as np

from .errors import SpaceError


def sphere(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def rastrigin(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def rosenbrock(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float((1.0 - x[0]) ** 2) if x.size else 0.0
    return float(
        np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)
    )


BENCHMARKS = {"sphere": sphere, "rastrigin": rastrigin, "rosenbrock": rosenbrock}


def benchmark(kind: str, x: np.ndarray) -> float:
    """Evaluate a named benchmark at ``x``."""
    try:
        fn = BENCHMARKS[kind]
    except KeyError:
        raise SpaceError(f"unknown benchmark {kind!r}") from None
    x = np.asarray(x, dtype=float)
    if x.size and not np.all(np.isfinite(x)):
        raise SpaceError("benchmark input must be finite")
    return fn(x)
