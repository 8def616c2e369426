"""Benchmark the compiled series kernels against the pure numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 5]

Times the two hot kernels (interval series, square-lattice series) at a few
realistic sizes and prints a table with the per-backend best-of-N wall times
and the resulting speedup.  If the compiled extension is unavailable the
script still runs and reports the fallback timings alone.
"""

import argparse
import os
import time

import numpy as np

from nodalscore import _kernels
from nodalscore._kernels import _series_py
from nodalscore.analytic import square_lattice


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def interval_cases(rng):
    for n_points, n_terms in [(256, 2000), (1024, 20000)]:
        xs = rng.uniform(0.0, 1.0, n_points)
        yield f"interval n_points={n_points} n_terms={n_terms}", (xs, n_terms)


def square_cases(rng):
    for n_points, lambda_cut in [(256, 500.0), (1024, 4000.0)]:
        xs = rng.uniform(0.0, 1.0, n_points)
        ys = rng.uniform(0.0, 1.0, n_points)
        ms, ns, ws = square_lattice(lambda_cut)
        label = f"square   n_points={n_points} lattice={ms.size}"
        yield label, (xs, ys, ms, ns, ws)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    opts = parser.parse_args()

    compiled = None
    if _kernels.BACKEND == "compiled":
        from nodalscore._kernels import _series as compiled  # noqa: F401

    print(f"selected backend: {_kernels.BACKEND}")
    print(f"visible cpus: {os.cpu_count()}  "
          "(the compiled kernels parallelize across points, so single-core "
          "machines see little gain over the vectorized fallback)")
    print(f"{'case':44s} {'pure (ms)':>10s} {'compiled (ms)':>14s} {'speedup':>8s}")

    rng = np.random.default_rng(0)
    cases = [(label, _series_py.interval_series, compiled.interval_series if compiled else None, args)
             for label, args in interval_cases(rng)]
    cases += [(label, _series_py.square_series, compiled.square_series if compiled else None, args)
              for label, args in square_cases(rng)]

    for label, pure_fn, compiled_fn, args in cases:
        pure_ms = best_of(opts.repeats, pure_fn, *args) * 1e3
        if compiled_fn is None:
            print(f"{label:44s} {pure_ms:10.2f} {'n/a':>14s} {'n/a':>8s}")
            continue
        ref = pure_fn(*args)
        out = compiled_fn(*args)
        if np.abs(np.asarray(out) - np.asarray(ref)).max() > 1e-10:
            raise SystemExit(f"backend mismatch on {label!r}")
        compiled_ms = best_of(opts.repeats, compiled_fn, *args) * 1e3
        print(f"{label:44s} {pure_ms:10.2f} {compiled_ms:14.2f} {pure_ms / compiled_ms:7.1f}x")


if __name__ == "__main__":
    main()
