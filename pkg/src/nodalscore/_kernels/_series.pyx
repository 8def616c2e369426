# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the trigonometric series kernels.

Same argument reduction as the pure backend (see _series_py): x is split so
that k * x_hi is an exact double for k <= 2**20, keeping frac(k*x) accurate
enough to preserve cusps at rational x.  Points are independent, so the
outer loop is parallel; per-point summation order is fixed.
"""

from libc.math cimport floor, fmod, sin

import numpy as np

from cython.parallel cimport prange

cdef double SPLIT = 67108864.0  # 2**26
cdef double PI = 3.14159265358979323846

MAX_TERMS = 1 << 20


def interval_series(double[::1] xs, int n_terms):
    cdef Py_ssize_t npts = xs.shape[0]
    out = np.zeros(npts, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef int k
    cdef double x_hi, x_lo, acc, r
    for i in prange(npts, nogil=True, schedule="static"):
        x_hi = floor(xs[i] * SPLIT + 0.5) / SPLIT
        x_lo = xs[i] - x_hi
        acc = 0.0
        for k in range(1, n_terms + 1):
            r = fmod(k * x_hi, 1.0) + k * x_lo
            r = r - floor(r)
            acc = acc + sin(PI * r) / k
        ov[i] = acc
    return out


def square_series(double[::1] xs, double[::1] ys,
                  int[::1] ms, int[::1] ns, double[::1] ws):
    cdef Py_ssize_t npts = xs.shape[0]
    cdef Py_ssize_t nterms = ms.shape[0]
    out = np.zeros(npts, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, t
    cdef double x_hi, x_lo, y_hi, y_lo, acc, rx, ry
    for i in prange(npts, nogil=True, schedule="static"):
        x_hi = floor(xs[i] * SPLIT + 0.5) / SPLIT
        x_lo = xs[i] - x_hi
        y_hi = floor(ys[i] * SPLIT + 0.5) / SPLIT
        y_lo = ys[i] - y_hi
        acc = 0.0
        for t in range(nterms):
            rx = fmod(ms[t] * x_hi, 1.0) + ms[t] * x_lo
            rx = rx - floor(rx)
            ry = fmod(ns[t] * y_hi, 1.0) + ns[t] * y_lo
            ry = ry - floor(ry)
            acc = acc + ws[t] * sin(PI * rx) * sin(PI * ry)
        ov[i] = acc
    return out
