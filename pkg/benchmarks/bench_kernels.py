#!/usr/bin/env python3
"""Benchmark the compiled banknote kernel against the numpy fallback.

The pair-tally loop is the hot path of the money Monte Carlo and of
every genetic-algorithm evaluation, so this is the loop worth compiling.
Both backends consume identical pre-drawn arrays; the script also checks
they produce identical tallies.

Run: python benchmarks/bench_kernels.py [n_pairs] [repeats]
"""

import sys
import time

import numpy as np

from qproto_bench._kernels import _money_py

try:
    from qproto_bench._kernels import _money_cy
except ImportError:
    _money_cy = None


def bench(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    rng = np.random.default_rng(0)
    args = (
        rng.integers(0, 8, size=n),
        rng.integers(0, 2, size=n),
        rng.random((n, 2)),
        rng.random((n, 2)),
        3e-5,
        0.74,
        0.05,
        0.005,
    )

    res_py, t_py = bench(_money_py.simulate_pair_block, args, repeats)
    print(f"pure-python (numpy): {t_py * 1e3:8.2f} ms  ({n / t_py / 1e6:6.1f} Mpairs/s)")
    if _money_cy is None:
        print("compiled kernel not available; install with a C compiler to compare")
        return
    res_cy, t_cy = bench(_money_cy.simulate_pair_block, args, repeats)
    print(f"compiled (cython):   {t_cy * 1e3:8.2f} ms  ({n / t_cy / 1e6:6.1f} Mpairs/s)")
    print(f"speedup: {t_py / t_cy:.2f}x")
    assert res_py == res_cy, f"backends disagree: {res_py} vs {res_cy}"
    print(f"tallies identical: n_valid={res_py[0]}, n_detected={res_py[1]}")


if __name__ == "__main__":
    main()
