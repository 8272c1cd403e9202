#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the three enumeration workloads that dominate real evaluations (series
coefficients, exhaustive expectation, spin sum) on both backends and prints
per-workload timings with the speedup.  Sizes are chosen so the pure backend
finishes in seconds; scale them up with the flags to stress the compiled one.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

import smoothcount._kernels as kernels
from smoothcount.interpolation import taylor_coefficients
from smoothcount.ising import IsingModel, partition_bruteforce
from smoothcount.model import ProbabilityVector, SparseSystem
from smoothcount.oracle import brute_force_expectation


def random_system(rng, n, m, col_nnz=3):
    entries = []
    for j in range(n):
        rows = rng.choice(m, size=min(col_nnz, m), replace=False)
        for i in sorted(int(v) for v in rows):
            entries.append((i, j, float(rng.uniform(-1.0, 1.0)) or 0.5))
    beta = [float(rng.integers(0, 2)) for _ in range(m)]
    gamma = [0.05] * m
    return SparseSystem.from_entries(m, n, entries, beta, gamma)


def time_call(fn, repeats):
    best = float("inf")
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--series-n", type=int, default=22,
                        help="variables for the coefficient workload")
    parser.add_argument("--series-degree", type=int, default=5)
    parser.add_argument("--brute-n", type=int, default=16,
                        help="variables for the exhaustive expectation")
    parser.add_argument("--spin-n", type=int, default=14,
                        help="spins for the partition sum")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    impls = kernels.backends()
    if "compiled" not in impls:
        print("compiled backend unavailable; showing pure backend only")
    rng = np.random.default_rng(args.seed)

    series_sys = random_system(rng, args.series_n, 6)
    brute_sys = random_system(rng, args.brute_n, 6)
    brute_p = ProbabilityVector.uniform(0.3, args.brute_n)
    x = tuple(0.4 for _ in range(args.series_n))
    spin_g = rng.uniform(-0.3, 0.3, size=(args.spin_n, args.spin_n))
    spin_g = np.triu(spin_g, 1)
    spin_g = spin_g + spin_g.T
    spin_f = rng.uniform(-1.0, 1.0, size=args.spin_n)
    spin_model = IsingModel.of(spin_g.tolist(), spin_f.tolist())

    workloads = {
        f"series coefficients (n={args.series_n}, N={args.series_degree})":
            lambda impl: taylor_coefficients(
                series_sys, x, args.series_degree, impl=impl),
        f"exhaustive expectation (n={args.brute_n})":
            lambda impl: brute_force_expectation(brute_sys, brute_p, impl=impl),
        f"spin partition sum (n={args.spin_n})":
            lambda impl: partition_bruteforce(spin_model, impl=impl),
    }

    width = max(len(name) for name in workloads)
    print(f"{'workload'.ljust(width)}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, call in workloads.items():
        row = [name.ljust(width)]
        pure_t, pure_v = time_call(lambda: call(impls["pure"]), args.repeats)
        row.append(f"{pure_t:9.3f}s")
        if "compiled" in impls:
            comp_t, comp_v = time_call(lambda: call(impls["compiled"]), args.repeats)
            row.append(f"{comp_t:9.3f}s")
            row.append(f"{pure_t / comp_t:7.1f}x")
            if hasattr(pure_v, "normalized"):
                drift = max(
                    (abs(a - b) / max(abs(a), 1.0)
                     for a, b in zip(pure_v.normalized, comp_v.normalized)),
                    default=0.0)
            elif hasattr(pure_v, "log_value"):
                drift = abs(pure_v.log_value - comp_v.log_value)
            else:
                drift = abs(pure_v - comp_v) / max(abs(pure_v), 1.0)
            row.append(f"agree {drift:.1e}")
        print("  ".join(row))


if __name__ == "__main__":
    main()
