#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

The two backends are bit-compatible; this script reports wall time per call
and the compiled/python speedup for each hot kernel.
"""

import argparse
import time

import numpy as np

from ratiokit._kernels import _fallback

try:
    from ratiokit._kernels import _core
except ImportError:
    _core = None

EDGES = np.array([0.4, 4 / 9, 0.5, 5 / 9, 0.6])


def bench(fn, *args, repeat):
    fn(*args)  # warm up
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    intervals = rng.exponential(1.0, 10**6)
    i1 = rng.exponential(1.0, 10**6)
    i2 = rng.exponential(1.0, 10**6)
    ratios = rng.random(10**6)
    matrix = rng.exponential(1.0, (1000, 1000))

    cases = [
        ("ratio_r_values (1e6)", "ratio_r_values", (intervals,)),
        ("pair_ratio_r_hits (1e6)", "pair_ratio_r_hits", (i1, i2, 0.4, 0.6)),
        ("count_between_closed (1e6)", "count_between_closed", (ratios, 0.4, 0.6)),
        ("bin_counts (1e6, 4 bins)", "bin_counts", (ratios, EDGES)),
        ("sequence_r_bin_counts (1000x1000)", "sequence_r_bin_counts", (matrix, EDGES)),
    ]

    if _core is None:
        print("compiled kernels not available; timing the numpy fallback only")

    header = f"{'kernel':<36} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in cases:
        t_py = bench(getattr(_fallback, name), *call_args, repeat=args.repeat)
        if _core is not None:
            t_c = bench(getattr(_core, name), *call_args, repeat=args.repeat)
            print(f"{label:<36} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_py / t_c:>7.1f}x")
        else:
            print(f"{label:<36} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
