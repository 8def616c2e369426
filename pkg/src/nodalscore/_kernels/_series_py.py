"""Pure numpy backend for the trigonometric series kernels.

Both backends evaluate |sin(k*pi*x)| as sin(pi * frac(k*x)) where frac is
computed with the multiplier split in half: the high part has at most 26
mantissa bits, so k * x_hi is exact for k <= 2**20 and the reduction does
not lose the cusp structure near rational x.
"""

import numpy as np

_SPLIT = 67108864.0  # 2**26
# k * x_hi must stay exactly representable: 26 bits of x_hi + 20 bits of k < 53
MAX_TERMS = 1 << 20
_CHUNK_BUDGET = 1 << 22


def _split(xs):
    x_hi = np.floor(xs * _SPLIT + 0.5) / _SPLIT
    return x_hi, xs - x_hi


def interval_series(xs, n_terms):
    """Per-point sum_{k=1..n_terms} sin(pi * frac(k*x)) / k."""
    out = np.zeros(xs.shape[0])
    if xs.shape[0] == 0:
        return out
    x_hi, x_lo = _split(xs)
    chunk = max(1, _CHUNK_BUDGET // xs.shape[0])
    for lo in range(1, n_terms + 1, chunk):
        k = np.arange(lo, min(lo + chunk, n_terms + 1), dtype=np.float64)
        r = np.mod(x_hi[:, None] * k, 1.0) + x_lo[:, None] * k
        r -= np.floor(r)
        out += (np.sin(np.pi * r) / k).sum(axis=1)
    return out


def square_series(xs, ys, ms, ns, ws):
    """Per-point sum_i ws[i] * sin(pi*frac(ms[i]*x)) * sin(pi*frac(ns[i]*y))."""
    out = np.zeros(xs.shape[0])
    if xs.shape[0] == 0 or ms.shape[0] == 0:
        return out
    x_hi, x_lo = _split(xs)
    y_hi, y_lo = _split(ys)
    chunk = max(1, _CHUNK_BUDGET // xs.shape[0])
    for lo in range(0, ms.shape[0], chunk):
        m = ms[lo:lo + chunk].astype(np.float64)
        n = ns[lo:lo + chunk].astype(np.float64)
        w = ws[lo:lo + chunk]
        rx = np.mod(x_hi[:, None] * m, 1.0) + x_lo[:, None] * m
        rx -= np.floor(rx)
        ry = np.mod(y_hi[:, None] * n, 1.0) + y_lo[:, None] * n
        ry -= np.floor(ry)
        out += (w * np.sin(np.pi * rx) * np.sin(np.pi * ry)).sum(axis=1)
    return out
