"""Backend selection for the hot GARCH recursions.

The Cython extension ``procyc._kernels`` is used when it was built; otherwise,
or when ``PROCYC_PURE_PYTHON`` is set to a non-empty value, the pure-Python
module takes over. Both produce bit-identical results.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("PROCYC_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None = active)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def garch11_simulate(eps, omega, alpha, beta, sigma2_0, *, backend=None):
    eps = np.ascontiguousarray(eps, dtype=float)
    s0 = np.ascontiguousarray(np.broadcast_to(np.asarray(sigma2_0, dtype=float), eps.shape[:1]))
    return get_backend(backend).garch11_simulate(eps, float(omega), float(alpha), float(beta), s0)


def garch11_filter(x, omega, alpha, beta, sigma2_0, *, backend=None):
    x = np.ascontiguousarray(x, dtype=float)
    return get_backend(backend).garch11_filter(x, float(omega), float(alpha), float(beta),
                                               float(sigma2_0))


def garch11_nll(x, omega, alpha, beta, sigma2_0, *, backend=None):
    x = np.ascontiguousarray(x, dtype=float)
    return get_backend(backend).garch11_nll(x, float(omega), float(alpha), float(beta),
                                            float(sigma2_0))
