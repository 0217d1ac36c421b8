#!/usr/bin/env python3
"""Benchmark the compiled engine against the pure-Python twin.

Runs identical lane ranges of the configuration-family sweep and
identical brute-force optima through both backends, checks that the
outputs agree bit for bit, and reports throughput.

Usage:
    python benchmarks/bench_fullsim.py [--lanes 2000] [--m 256] [--n 400]
    python benchmarks/bench_fullsim.py --full   # whole family, kernel only
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction as F

from parsched import fullsim
from parsched.core import JobSequence
from parsched.harness import gen_planted


def time_sweep(backend, eps, m, T, jobs, lanes):
    t0 = time.perf_counter()
    sweep = fullsim.a2_full_sweep(eps, m, T, jobs, lanes=lanes, backend=backend)
    return sweep, time.perf_counter() - t0


def time_brute(backend, seq):
    t0 = time.perf_counter()
    value = fullsim.brute_force_opt(seq, backend=backend)
    return value, time.perf_counter() - t0


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--lanes", type=int, default=2000,
                        help="lanes per backend for the sweep comparison")
    parser.add_argument("--m", type=int, default=256)
    parser.add_argument("--n", type=int, default=400, help="approximate job count")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--full", action="store_true",
                        help="also sweep the whole family on the kernel")
    args = parser.parse_args()

    if not fullsim.kernel_available():
        print("compiled engine not available; nothing to compare")
        return 1

    eps, T = F(1), F(1)
    counts = max(1, round(args.n / args.m))
    seq = gen_planted(args.m, counts=counts, denom=24, seed=args.seed)
    jobs = seq.sizes()
    print(f"sweep workload: m={args.m}, n={len(seq)}, lanes={args.lanes}")

    lanes = (0, args.lanes)
    kernel, t_kernel = time_sweep("kernel", eps, args.m, T, jobs, lanes)
    fallback, t_fallback = time_sweep("fallback", eps, args.m, T, jobs, lanes)
    assert kernel.makespans_scaled == fallback.makespans_scaled, "backend mismatch"
    assert kernel.fill_violations == fallback.fill_violations
    print(f"  kernel   : {t_kernel:8.3f}s  ({args.lanes / t_kernel:10.0f} lanes/s)")
    print(f"  fallback : {t_fallback:8.3f}s  ({args.lanes / t_fallback:10.0f} lanes/s)")
    print(f"  speedup  : {t_fallback / t_kernel:8.1f}x  (outputs identical)")

    brute_seq = JobSequence.from_sizes(4, [F(k % 7 + 1, 8) for k in range(10)])
    v_kernel, tb_kernel = time_brute("kernel", brute_seq)
    v_fallback, tb_fallback = time_brute("fallback", brute_seq)
    assert v_kernel == v_fallback
    print(f"brute force (m=4, n=10): kernel {tb_kernel:.3f}s, "
          f"fallback {tb_fallback:.3f}s, speedup {tb_fallback / tb_kernel:.1f}x")

    if args.full:
        total = (fullsim.a2_full_sweep(eps, args.m, T, jobs, lanes=(0, 1)).params.kappa + 1) ** 3
        t0 = time.perf_counter()
        sweep = fullsim.a2_full_sweep(eps, args.m, T, jobs)
        dt = time.perf_counter() - t0
        best_lane, best = sweep.best()
        print(f"full family: {sweep.lane_count} lanes in {dt:.1f}s "
              f"({sweep.lane_count / dt:.0f} lanes/s), best lane {best_lane} makespan {best}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
