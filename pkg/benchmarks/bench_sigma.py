#!/usr/bin/env python3
"""Benchmark the compiled scan kernel against the numpy fallback.

Usage:
    python benchmarks/bench_sigma.py [--su2-points N] [--su3-points N]
"""
import argparse
import time

import numpy as np

from orbitstrata import su2, su3
from orbitstrata._backend import available_backends
from orbitstrata.groundstate import KERNEL_EIG_RTOL, KERNEL_PROJ_RTOL


def time_backend(fn, fields, f, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        sigma, divergent = fn(fields, f, 1.0, KERNEL_EIG_RTOL, KERNEL_PROJ_RTOL)
        best = min(best, time.perf_counter() - start)
    return best, sigma, divergent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--su2-points", type=int, default=200_000)
    parser.add_argument("--su3-points", type=int, default=20_000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    impls = available_backends()
    print(f"available backends: {', '.join(impls)}")
    print(f"{'group':<6} {'points':>8} {'backend':<8} {'total s':>9} {'us/point':>9} {'speedup':>8}")

    for spec, n in ((su2(), args.su2_points), (su3(), args.su3_points)):
        fields = rng.normal(size=(n, 3, spec.dim))
        f = np.asarray(spec.f)
        results = {}
        for name, impl in impls.items():
            elapsed, sigma, divergent = time_backend(impl.sigma_batch, fields, f)
            results[name] = (elapsed, sigma, divergent)
        base = results["python"][0]
        for name, (elapsed, _, _) in results.items():
            print(
                f"{spec.group_id.value:<6} {n:>8} {name:<8} {elapsed:>9.3f} "
                f"{1e6 * elapsed / n:>9.2f} {base / elapsed:>7.1f}x"
            )
        if len(results) == 2:
            _, s_py, d_py = results["python"]
            _, s_cy, d_cy = results["cython"]
            flags_match = np.array_equal(d_py, d_cy)
            finite = ~d_py
            err = np.max(np.abs(s_py[finite] - s_cy[finite]) / (1.0 + np.abs(s_py[finite])))
            print(
                f"{'':<6} backend agreement: max rel diff {err:.2e}, "
                f"flags match: {flags_match}, flagged points: {int(d_py.sum())}"
            )


if __name__ == "__main__":
    main()
