"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy/scipy
versions are. Setting ``VMRIC_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("VMRIC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def ar_recursion(innovations, coefficients) -> np.ndarray:
    """Filter ``innovations`` through an AR recursion with zero initial state."""
    innovations = np.ascontiguousarray(innovations, dtype=np.float64)
    coefficients = np.ascontiguousarray(coefficients, dtype=np.float64)
    return _impl.ar_recursion(innovations, coefficients)


def lagged_cross_moment(x, e, lag: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    return _impl.lagged_cross_moment(x, e, int(lag))
