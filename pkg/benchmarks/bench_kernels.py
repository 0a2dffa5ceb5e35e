#!/usr/bin/env python3
"""Timing comparison of the jit-compiled numeric kernels against the pure
Python fallback selected by AERIALCOV_NO_NUMBA=1.

The kernel path is fixed at import time, so each mode runs in a fresh
subprocess; the parent collects per-workload wall times and prints a table.

Usage: python3 benchmarks/bench_kernels.py [--quick]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_CHILD = r"""
import json, sys, time

from aerialcov import urban_defaults
from aerialcov.channel import BsKind, LinkKind
from aerialcov.coverage import SinrCurve, coverage_probability, mean_sinr
from aerialcov.interference import LaplaceContext, laplace_general
from aerialcov.numerics import QuadPolicy

full = bool(int(sys.argv[1]))
cfg = urban_defaults()
pol = QuadPolicy(rel_tol=1e-4, abs_tol=1e-10)


def timed(fn, repeats):
    fn()  # warmup: jit compilation / cache fill
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_laplace():
    for bs, d, theta in ((BsKind.Tbs, 200.0, None),
                         (BsKind.Dedicated, 300.0, 0.7)):
        ctx = LaplaceContext(bs=bs, link=LinkKind.Los, distance=d,
                             theta_d=theta, params=cfg)
        for s in (1e4, 1e6, 1e8):
            laplace_general(s, ctx, pol)


def bench_mean_sinr():
    for bs, dists in ((BsKind.Tbs, (200.0, 800.0)),
                      (BsKind.Dedicated, (300.0, 800.0))):
        for d in dists:
            mean_sinr(d, bs, cfg, pol)


def bench_curve():
    SinrCurve(cfg, BsKind.Dedicated, pol)


def bench_coverage():
    coverage_probability(cfg.tau, cfg, pol)


workloads = [
    ("laplace transforms (6 pts)", bench_laplace, 3),
    ("mean SINR (4 pts)", bench_mean_sinr, 1),
]
if full:
    workloads.append(("SINR curve build", bench_curve, 1))
    workloads.append(("coverage probability", bench_coverage, 1))

out = {}
for name, fn, repeats in workloads:
    out[name] = timed(fn, repeats)
print(json.dumps(out))
"""


def run_mode(no_numba: bool, full: bool) -> dict[str, float]:
    env = dict(os.environ, AERIALCOV_NO_NUMBA="1" if no_numba else "0")
    proc = subprocess.run(
        [sys.executable, "-c", _CHILD, str(int(full))],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true",
                        help="also time SINR-curve construction and the full "
                             "coverage integral (minutes without numba)")
    args = parser.parse_args()

    print("timing jit path ...", flush=True)
    fast = run_mode(no_numba=False, full=args.full)
    print("timing pure-Python fallback (AERIALCOV_NO_NUMBA=1) ...", flush=True)
    slow = run_mode(no_numba=True, full=args.full)

    width = max(len(k) for k in fast)
    print(f"\n{'workload':<{width}}  {'jit':>10}  {'fallback':>10}  {'speedup':>8}")
    for name, t_fast in fast.items():
        t_slow = slow[name]
        ratio = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<{width}}  {t_fast:>9.4f}s  {t_slow:>9.4f}s  {ratio:>7.1f}x")


if __name__ == "__main__":
    main()
