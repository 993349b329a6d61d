#!/usr/bin/env python3
"""Benchmark the compiled statistics kernel against the NumPy fallback.

Times the per-replication statistic profile (the hot inner loop of null
tables and power studies) and an end-to-end null-table build.

    python3 benchmarks/bench_kernels.py --reps 5000
"""

import argparse
import time

import numpy as np

from checkerdep._kernels import _pykernels

try:
    from checkerdep._kernels import _ckernels
except ImportError:
    _ckernels = None

SHAPES = [(2, 36), (2, 216), (3, 60), (3, 216), (4, 1296)]


def bench_profiles(kernel, ranks_batch) -> float:
    t0 = time.perf_counter()
    for ranks in ranks_batch:
        kernel.eta_profile(ranks)
    return (time.perf_counter() - t0) / len(ranks_batch)


def bench_null_table(d: int, n: int, sims: int) -> float:
    from checkerdep.montecarlo import _NULL_MEMO, build_null

    _NULL_MEMO.clear()
    t0 = time.perf_counter()
    build_null("tv", d, n, sims, seed=0)
    return time.perf_counter() - t0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=5000,
                        help="profiles per shape")
    parser.add_argument("--null-sims", type=int, default=5000,
                        help="replications for the end-to-end table build")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'shape':>12} {'numpy':>12} {'cython':>12} {'speedup':>9}")
    for d, n in SHAPES:
        batch = [
            np.column_stack([rng.permutation(n) + 1 for _ in range(d)])
            for _ in range(min(args.reps, 2000 if n > 600 else args.reps))
        ]
        t_py = bench_profiles(_pykernels, batch)
        if _ckernels is None:
            print(f"{f'd={d} n={n}':>12} {t_py * 1e6:>10.1f}us {'-':>12} {'-':>9}")
            continue
        t_cy = bench_profiles(_ckernels, batch)
        np.testing.assert_allclose(_pykernels.eta_profile(batch[0]),
                                   _ckernels.eta_profile(batch[0]),
                                   atol=1e-12)
        print(f"{f'd={d} n={n}':>12} {t_py * 1e6:>10.1f}us "
              f"{t_cy * 1e6:>10.1f}us {t_py / t_cy:>8.1f}x")

    import checkerdep._kernels as kernels

    print(f"\nactive backend: {kernels.BACKEND}")
    t = bench_null_table(2, 36, args.null_sims)
    print(f"null table (d=2, n=36, N={args.null_sims}): {t:.2f}s "
          f"({t / args.null_sims * 1e6:.0f}us per replication)")


if __name__ == "__main__":
    main()
