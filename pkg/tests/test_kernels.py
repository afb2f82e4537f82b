import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vmric import kernels


def naive_ar(innov, phi):
    y = []
    for t, u in enumerate(innov):
        y.append(u + sum(phi[k] * y[t - 1 - k] for k in range(len(phi)) if t - 1 - k >= 0))
    return np.array(y)


def naive_cross(x, e, lag):
    n, w = e.shape
    c = np.zeros((w, w))
    for t in range(n - lag):
        for i in range(w):
            for j in range(w):
                c[i, j] += x[t] * x[t + lag] * e[t, i] * e[t + lag, j]
    return c / (n - lag)


@pytest.mark.parametrize("phi", [[0.0], [0.5], [0.4, -0.75], [0.3, 0.2, -0.1]])
def test_ar_recursion_matches_loop(backend, rng, phi):
    innov = rng.standard_normal(200)
    phi = np.array(phi)
    np.testing.assert_allclose(backend.ar_recursion(innov, phi), naive_ar(innov, phi), rtol=1e-12, atol=1e-12)


def test_ar_recursion_empty_coefficients(backend, rng):
    innov = rng.standard_normal(10)
    np.testing.assert_array_equal(backend.ar_recursion(innov, np.zeros(0)), innov)


@pytest.mark.parametrize("lag", [0, 1, 3])
@pytest.mark.parametrize("w", [1, 2, 3])
def test_lagged_cross_moment_matches_loop(backend, rng, lag, w):
    x = rng.standard_normal(50)
    e = rng.standard_normal((50, w))
    np.testing.assert_allclose(backend.lagged_cross_moment(x, e, lag), naive_cross(x, e, lag), rtol=1e-12, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, st.integers(3, 60), elements=st.floats(-10, 10)),
    st.floats(-0.9, 0.9),
    st.integers(0, 2),
)
def test_backends_agree(data, phi, lag):
    from vmric import _kernels_py

    try:
        from vmric import _kernels
    except ImportError:
        pytest.skip("compiled kernels not built")
    coef = np.array([phi])
    np.testing.assert_allclose(_kernels.ar_recursion(data, coef), _kernels_py.ar_recursion(data, coef), rtol=1e-10, atol=1e-10)
    e = np.column_stack([data, data[::-1]])
    lag = min(lag, len(data) - 1)
    np.testing.assert_allclose(
        _kernels.lagged_cross_moment(data, e, lag), _kernels_py.lagged_cross_moment(data, e, lag), rtol=1e-10, atol=1e-8
    )


def test_wrapper_accepts_noncontiguous(rng):
    e = rng.standard_normal((40, 4))[:, ::2]
    x = rng.standard_normal(80)[::2]
    np.testing.assert_allclose(kernels.lagged_cross_moment(x, e, 1), naive_cross(x, np.array(e), 1), rtol=1e-12)


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
