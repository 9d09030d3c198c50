"""Pure-Python GARCH(1,1) recursions; reference for the compiled kernels."""
import math

import numpy as np


def garch11_simulate(eps, omega, alpha, beta, sigma2_0):
    """Run the variance recursion on a batch of innovation rows.

    Row ``i`` yields ``x[i, t] = eps[i, t] * sqrt(s2[i, t])`` with
    ``s2[i, t + 1] = omega + alpha * x[i, t]**2 + beta * s2[i, t]`` and
    ``s2[i, 0] = sigma2_0[i]``.
    """
    eps = np.asarray(eps, dtype=float)
    rows, n = eps.shape
    x = np.empty((rows, n))
    s2 = np.empty((rows, n))
    v = np.array(sigma2_0, dtype=float)
    for t in range(n):
        xt = eps[:, t] * np.sqrt(v)
        x[:, t] = xt
        s2[:, t] = v
        v = omega + alpha * xt * xt + beta * v
    return x, s2


def garch11_filter(x, omega, alpha, beta, sigma2_0):
    n = len(x)
    s2 = np.empty(n)
    if n == 0:
        return s2
    xs = np.asarray(x, dtype=float).tolist()
    v = float(sigma2_0)
    s2[0] = v
    for t in range(1, n):
        v = omega + alpha * xs[t - 1] * xs[t - 1] + beta * v
        s2[t] = v
    return s2


def garch11_nll(x, omega, alpha, beta, sigma2_0):
    v = float(sigma2_0)
    acc = 0.0
    log = math.log
    for xt in np.asarray(x, dtype=float).tolist():
        acc += log(v) + xt * xt / v
        v = omega + alpha * xt * xt + beta * v
    return 0.5 * acc
