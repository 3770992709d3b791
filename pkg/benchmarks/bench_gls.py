"""Benchmark the weighted least-squares scan kernel: compiled vs numpy.

Usage: python3 benchmarks/bench_gls.py [--repeats 200]

The kernel evaluates the weighted residual objective over the whole
calibration scan grid for one detection record, which is the inner loop of
the estimator. Problem sizes mirror production use (1001 scan points,
8 projection components).
"""

import argparse
import timeit

import numpy as np

from tempres import _gls_numpy
from tempres import kernels

try:
    from tempres import _gls_core
except ImportError:
    _gls_core = None


def bench(fn, counts, weights, model, repeats):
    timer = timeit.Timer(lambda: fn(counts, weights, model))
    number, _ = timer.autorange()
    return min(timer.repeat(repeats, number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repeats per backend and size")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'scan points':>12} {'numpy (us)':>12} {'cython (us)':>12} {'speedup':>8}")
    for n_scan in (101, 1001, 10001):
        counts = rng.random(8)
        weights = rng.random(8) * 100 + 1
        model = rng.random((n_scan, 8))
        t_np = bench(_gls_numpy.weighted_scan, counts, weights, model, args.repeats)
        if _gls_core is None:
            print(f"{n_scan:>12} {t_np * 1e6:>12.2f} {'n/a':>12} {'n/a':>8}")
            continue
        t_cy = bench(_gls_core.weighted_scan, counts, weights, model, args.repeats)
        np.testing.assert_allclose(
            _gls_core.weighted_scan(counts, weights, model),
            _gls_numpy.weighted_scan(counts, weights, model), rtol=1e-12)
        print(f"{n_scan:>12} {t_np * 1e6:>12.2f} {t_cy * 1e6:>12.2f} "
              f"{t_np / t_cy:>7.2f}x")


if __name__ == "__main__":
    main()
