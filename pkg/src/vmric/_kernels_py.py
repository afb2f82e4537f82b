"""Pure-Python (numpy/scipy) versions of the compiled kernels."""
from __future__ import annotations

import numpy as np
from scipy.signal import lfilter


def ar_recursion(innovations: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    coefficients = np.asarray(coefficients, dtype=float)
    denominator = np.concatenate(([1.0], -coefficients))
    return lfilter([1.0], denominator, np.asarray(innovations, dtype=float))


def lagged_cross_moment(x: np.ndarray, e: np.ndarray, lag: int) -> np.ndarray:
    m = e.shape[0] - lag
    u = x[:, None] * e
    return u[:m].T @ u[lag:] / m
