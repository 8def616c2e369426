"""Kernel backend selection: compiled Cython core with a pure numpy fallback.

The compiled module is optional; if it failed to build (or the environment
variable NODALSCORE_FORCE_PURE is set) the numpy implementation is used.
Both backends share the same argument-reduction scheme, so results agree to
rounding error and either one satisfies the public contracts.
"""

import os

import numpy as np

from . import _series_py

if os.environ.get("NODALSCORE_FORCE_PURE"):
    _impl = _series_py
    BACKEND = "pure"
else:
    try:
        from . import _series as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _series_py
        BACKEND = "pure"

MAX_TERMS = _series_py.MAX_TERMS


def interval_series(xs, n_terms):
    """sum_{k<=n_terms} |sin(k*pi*x)| / k for each x, via reduced arguments."""
    n_terms = int(n_terms)
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if n_terms > MAX_TERMS:
        raise ValueError(f"n_terms > {MAX_TERMS} exceeds the exact-reduction range")
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    return _impl.interval_series(xs, n_terms)


def square_series(xs, ys, ms, ns, ws):
    """sum_i ws[i] * |sin(ms[i]*pi*x)| * |sin(ns[i]*pi*y)| per point (x, y)."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have the same length")
    ms = np.ascontiguousarray(ms, dtype=np.int32)
    ns = np.ascontiguousarray(ns, dtype=np.int32)
    ws = np.ascontiguousarray(ws, dtype=np.float64)
    if not (ms.shape == ns.shape == ws.shape):
        raise ValueError("ms, ns, ws must have the same length")
    if ms.size and (ms.max(initial=1) > MAX_TERMS or ns.max(initial=1) > MAX_TERMS):
        raise ValueError("frequency exceeds the exact-reduction range")
    return _impl.square_series(xs, ys, ms, ns, ws)
