import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procyc import kernels

BACKENDS = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
params = st.tuples(st.floats(1e-4, 1.0), st.floats(0.0, 0.3), st.floats(0.0, 0.69))


def test_active_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")
@settings(max_examples=40, deadline=None)
@given(p=params, seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 300))
def test_backends_bit_identical(p, seed, n):
    omega, alpha, beta = p
    eps = np.random.default_rng(seed).standard_normal((3, n))
    a = kernels.garch11_simulate(eps, omega, alpha, beta, [0.5, 1.0, 2.0], backend="cython")
    b = kernels.garch11_simulate(eps, omega, alpha, beta, [0.5, 1.0, 2.0], backend="python")
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    x = a[0][1]
    assert np.array_equal(kernels.garch11_filter(x, omega, alpha, beta, 0.7, backend="cython"),
                          kernels.garch11_filter(x, omega, alpha, beta, 0.7, backend="python"))
    assert (kernels.garch11_nll(x, omega, alpha, beta, 0.7, backend="cython")
            == kernels.garch11_nll(x, omega, alpha, beta, 0.7, backend="python"))


@pytest.mark.parametrize("backend", BACKENDS)
def test_recursion_by_hand(backend):
    eps = np.array([[1.0, -2.0, 0.5]])
    x, s2 = kernels.garch11_simulate(eps, 0.1, 0.2, 0.3, 1.0, backend=backend)
    v1 = 0.1 + 0.2 * 1.0 + 0.3 * 1.0
    v2 = 0.1 + 0.2 * (2.0 * np.sqrt(v1)) ** 2 + 0.3 * v1
    assert np.allclose(s2[0], [1.0, v1, v2], rtol=1e-15)
    assert np.allclose(x[0], eps[0] * np.sqrt(s2[0]), rtol=1e-15)
    assert np.allclose(kernels.garch11_filter(x[0], 0.1, 0.2, 0.3, 1.0, backend=backend), s2[0],
                       rtol=1e-15)
    nll = 0.5 * np.sum(np.log(s2[0]) + x[0] ** 2 / s2[0])
    assert kernels.garch11_nll(x[0], 0.1, 0.2, 0.3, 1.0, backend=backend) == pytest.approx(nll)


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_filter(backend):
    assert kernels.garch11_filter(np.empty(0), 0.1, 0.1, 0.1, 1.0, backend=backend).size == 0
