# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled GARCH(1,1) recursions.

Arithmetic order mirrors ``_kernels_py`` term for term so both backends agree
to the last bit (the extension is built with ``-ffp-contract=off``).
"""
import numpy as np

from libc.math cimport log, sqrt


def garch11_simulate(const double[:, ::1] eps, double omega, double alpha, double beta,
                     const double[::1] sigma2_0):
    cdef Py_ssize_t rows = eps.shape[0], n = eps.shape[1], i, t
    cdef double v, xt
    x_arr = np.empty((rows, n))
    s_arr = np.empty((rows, n))
    cdef double[:, ::1] x = x_arr
    cdef double[:, ::1] s2 = s_arr
    with nogil:
        for i in range(rows):
            v = sigma2_0[i]
            for t in range(n):
                xt = eps[i, t] * sqrt(v)
                x[i, t] = xt
                s2[i, t] = v
                v = omega + alpha * xt * xt + beta * v
    return x_arr, s_arr


def garch11_filter(const double[::1] x, double omega, double alpha, double beta,
                   double sigma2_0):
    cdef Py_ssize_t n = x.shape[0], t
    s_arr = np.empty(n)
    cdef double[::1] s2 = s_arr
    if n == 0:
        return s_arr
    with nogil:
        s2[0] = sigma2_0
        for t in range(1, n):
            s2[t] = omega + alpha * x[t - 1] * x[t - 1] + beta * s2[t - 1]
    return s_arr


def garch11_nll(const double[::1] x, double omega, double alpha, double beta,
                double sigma2_0):
    cdef Py_ssize_t n = x.shape[0], t
    cdef double v = sigma2_0, acc = 0.0
    with nogil:
        for t in range(n):
            acc += log(v) + x[t] * x[t] / v
            v = omega + alpha * x[t] * x[t] + beta * v
    return 0.5 * acc
