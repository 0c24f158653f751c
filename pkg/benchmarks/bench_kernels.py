#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Runs the two hot loops on a representative community-recovery-sized graph
(200 agents x 1000 artifacts at density 0.1) and prints timings for both
backends.  Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from spine.bigraph import project
from spine.cellprob import bicm
from spine.kernels import _python
from spine.seeding import derive_rng
from spine.synth import generate

try:
    from spine.kernels import _speedups
except ImportError:
    _speedups = None


def bench(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def graph_csr(g):
    rows, cols = np.nonzero(g.cells)
    ptr = np.zeros(g.m + 1, dtype=np.int64)
    np.cumsum(g.row_sums, out=ptr[1:])
    return cols.astype(np.int64), ptr


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    m, n = (60, 200) if args.quick else (200, 1000)
    trades = 20_000 if args.quick else 100_000
    g = generate(m, n, 0.1, "right", "right", seed=7)
    print(f"graph: {m} x {n}, fill {g.fill}")
    backends = [("python", _python)] + ([("compiled", _speedups)] if _speedups else [])
    if _speedups is None:
        print("compiled kernels not built; benchmarking the fallback only")

    print(f"\ncurveball: {trades} trades")
    rng = derive_rng(3, "bench")
    lo = rng.integers(0, m, size=trades, dtype=np.int64)
    delta = rng.integers(1, m, size=trades, dtype=np.int64)
    seeds = rng.integers(0, 2**64, size=trades, dtype=np.uint64)
    times = {}
    for name, impl in backends:
        data, ptr = graph_csr(g)
        times[name] = bench(lambda: impl.curveball_trades(data, ptr, n, lo, delta, seeds), 1)
        print(f"  {name:9s} {times[name]:8.3f} s   ({trades / times[name] / 1e6:.2f} M trades/s)")
    if len(times) == 2:
        print(f"  speedup   {times['python'] / times['compiled']:.1f}x")

    pairs = m * (m - 1) // 2
    print(f"\npoisson-binomial tails: {pairs} agent pairs, {n} cells each")
    probs = bicm(g).probs
    iu, ju = np.triu_indices(m, k=1)
    weights = project(g).weights[iu, ju]
    times = {}
    for name, impl in backends:
        times[name] = bench(lambda: impl.poibin_tail_pairs(probs, iu, ju, weights), 2)
        print(f"  {name:9s} {times[name]:8.3f} s   ({pairs / times[name]:.0f} pairs/s)")
    if len(times) == 2:
        print(f"  speedup   {times['python'] / times['compiled']:.1f}x")


if __name__ == "__main__":
    main()
