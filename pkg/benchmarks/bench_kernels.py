"""Timing comparison of the JIT-compiled and pure-numpy kernel backends.

Builds a realistic 2-D hierarchical combination, then times the two hot
kernels on both backends, plus the shared separable tensor-grid path for
reference.  Run:

    python benchmarks/bench_kernels.py [--points 200000] [--repeats 5]

Forcing `SPARSEQI_NO_NUMBA=1` in the environment changes only the default
dispatch; this script always asks for each backend explicitly.
"""

import argparse
import time

import numpy as np

from sparseqi import kernels
from sparseqi.bspline import piece_table
from sparseqi.quasi_interp import SampleCache, builtin_scheme, decompose
from sparseqi.testfuncs import random_mixed_smooth


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    scheme = builtin_scheme("cubic")
    f = random_mixed_smooth(1.25, 64, 2, seed=0)
    hc = decompose(scheme, f, args.m, 2, cache=SampleCache(f, scheme.ell, 2))
    nblocks = len(hc.block_items())
    print(f"combination: d=2, m={args.m}, {nblocks} blocks, order {scheme.ell}")

    rng = np.random.default_rng(1)
    pts = rng.random((args.points, 2))
    table = piece_table(scheme.ell)

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    results = {}
    baseline = {}

    # scattered-point evaluation of the full combination
    for backend in backends:
        hc.eval_points(pts[:128], backend=backend)  # warm the JIT
        dt = time_call(lambda b=backend: hc.eval_points(pts, backend=b), args.repeats)
        results[f"scatter/{backend}"] = dt
        baseline[f"scatter/{backend}"] = args.points / dt

    # raw piece evaluation
    u = rng.random(args.points) * scheme.ell
    for backend in backends:
        kernels.spline_piece_values(table, u[:128], backend=backend)
        dt = time_call(
            lambda b=backend: kernels.spline_piece_values(table, u, backend=b),
            args.repeats,
        )
        results[f"pieces/{backend}"] = dt

    # separable tensor-grid path (BLAS either way) at a comparable point count
    n_axis = int(np.sqrt(args.points))
    axes = [np.arange(n_axis) / n_axis] * 2
    dt = time_call(lambda: hc.eval_on_axes(axes), args.repeats)
    results[f"grid/separable ({n_axis}x{n_axis})"] = dt

    width = max(len(k) for k in results)
    print(f"\n{'kernel':<{width}}  best time    points/s")
    for key, dt in results.items():
        npts = n_axis * n_axis if key.startswith("grid") else args.points
        print(f"{key:<{width}}  {dt * 1e3:9.2f} ms  {npts / dt:12.3e}")
    if kernels.HAVE_NUMBA:
        speedup = results["scatter/numpy"] / results["scatter/numba"]
        print(f"\nscattered-eval speedup numba vs numpy: {speedup:.1f}x")

    # the two backends must agree
    a = hc.eval_points(pts[:5000], backend="numpy")
    if kernels.HAVE_NUMBA:
        b = hc.eval_points(pts[:5000], backend="numba")
        print(f"max |numba - numpy| on 5000 points: {np.max(np.abs(a - b)):.3e}")


if __name__ == "__main__":
    main()
