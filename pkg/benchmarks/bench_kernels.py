#!/usr/bin/env python3
"""Benchmark the compiled series kernels against the pure-Python fallback.

Times the three public entry points that dispatch into the kernel layer:

  gauss_2f1          Gauss series with argument transform, scalar calls
  hyp_3f2_unit       unit-argument series behind covariance/correlation
  moschopoulos_pmf   gamma-convolution mixture weights behind minima laws

Both backends are exercised in one process by rebinding the kernel module
at its two import sites (`mvlomax.specfun._kernels` and
`mvlomax.extremes._kernels`); the call recipes and parameter grids are
identical, so the timing difference isolates the kernel implementation.
Each workload is checked for cross-backend agreement before timing so a
speedup can never come from computing something different.

Run:  python3 benchmarks/bench_kernels.py [--repeat N] [--scale S]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from mvlomax import extremes, specfun
from mvlomax.extremes import moschopoulos_pmf
from mvlomax.specfun import gauss_2f1, hyp_3f2_unit

try:
    from mvlomax import _kernels_cy
except ImportError:
    _kernels_cy = None
from mvlomax import _kernels_pure


def _use_backend(mod) -> None:
    specfun._kernels = mod
    extremes._kernels = mod


def _workload_2f1(scale: int):
    rng = np.random.default_rng(101)
    m = 400 * scale
    a = rng.uniform(0.3, 9.0, m)
    b = rng.uniform(0.3, 9.0, m)
    c = a + b + rng.uniform(0.1, 5.0, m)
    z = rng.uniform(-6.0, 0.97, m)

    def run():
        acc = 0.0
        for i in range(m):
            acc += gauss_2f1(a[i], b[i], c[i], z[i]).value
        return acc

    return run


def _workload_3f2(scale: int):
    # the parameter shape covariance() produces: two unit numerator
    # entries, denominators above 2 so second moments exist
    rng = np.random.default_rng(202)
    m = 150 * scale
    b1 = rng.uniform(2.3, 8.0, m)
    b2 = rng.uniform(2.3, 8.0, m)
    a1 = rng.uniform(0.5, 1.0, m) * np.minimum(b1, b2)

    def run():
        acc = 0.0
        for i in range(m):
            acc += hyp_3f2_unit(a1[i], 1.0, 1.0, b1[i], b2[i]).value
        return acc

    return run


def _workload_mosch(scale: int):
    rng = np.random.default_rng(303)
    m = 30 * scale
    cases = []
    for _ in range(m):
        k = int(rng.integers(2, 7))
        shapes = tuple(rng.uniform(0.4, 3.0, k))
        rates = tuple(rng.uniform(1.0, 40.0, k))
        cases.append((shapes, rates))

    def run():
        acc = 0.0
        for shapes, rates in cases:
            mix = moschopoulos_pmf(shapes, rates)
            acc += len(mix.weights) + mix.weights[0]
        return acc

    return run


def _time(run, repeat: int) -> float:
    run()  # warm-up
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing passes per workload (best-of is reported)")
    ap.add_argument("--scale", type=int, default=1,
                    help="multiplier on every workload size")
    args = ap.parse_args(argv)

    if _kernels_cy is None:
        ap.exit(1, "compiled backend is not built; nothing to compare\n")

    workloads = [
        ("gauss_2f1", _workload_2f1(args.scale)),
        ("hyp_3f2_unit", _workload_3f2(args.scale)),
        ("moschopoulos_pmf", _workload_mosch(args.scale)),
    ]

    print(f"{'workload':<18} {'pure [s]':>10} {'compiled [s]':>13} {'speedup':>9}")
    try:
        for name, run in workloads:
            _use_backend(_kernels_cy)
            got_cy = run()
            _use_backend(_kernels_pure)
            got_py = run()
            rel = abs(got_cy - got_py) / max(abs(got_py), 1e-300)
            if rel > 1e-9:
                raise AssertionError(
                    f"{name}: backends disagree (rel {rel:.2e}); not timing")
            t_py = _time(run, args.repeat)
            _use_backend(_kernels_cy)
            t_cy = _time(run, args.repeat)
            print(f"{name:<18} {t_py:>10.4f} {t_cy:>13.4f} {t_py / t_cy:>8.1f}x")
    finally:
        _use_backend(_kernels_cy)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
