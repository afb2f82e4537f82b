# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Must agree with ``_kernels_py`` to rounding."""
import numpy as np


def ar_recursion(const double[::1] innovations, const double[::1] coefficients):
    """Run y[t] = innovations[t] + sum_k coefficients[k] * y[t-1-k] from zero state."""
    cdef Py_ssize_t n = innovations.shape[0]
    cdef Py_ssize_t p = coefficients.shape[0]
    cdef Py_ssize_t t, k, kmax
    cdef double acc
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    for t in range(n):
        acc = innovations[t]
        kmax = p if p < t else t
        for k in range(kmax):
            acc = acc + coefficients[k] * y[t - 1 - k]
        y[t] = acc
    return out


def lagged_cross_moment(const double[::1] x, const double[:, ::1] e, Py_ssize_t lag):
    """Average of x[t] x[t+lag] e[t] e[t+lag]^T over t < N - lag."""
    cdef Py_ssize_t n = e.shape[0]
    cdef Py_ssize_t w = e.shape[1]
    cdef Py_ssize_t m = n - lag
    cdef Py_ssize_t t, i, j
    cdef double xx, xe
    out = np.zeros((w, w), dtype=np.float64)
    cdef double[:, ::1] c = out
    for t in range(m):
        xx = x[t] * x[t + lag]
        for i in range(w):
            xe = xx * e[t, i]
            for j in range(w):
                c[i, j] += xe * e[t + lag, j]
    for i in range(w):
        for j in range(w):
            c[i, j] /= m
    return out
