#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Both implementations always exist; this script times them side by side on
representative workloads (the acceptance-suite shapes) regardless of which
backend the package currently selects.
"""

import argparse
import time

import numpy as np

from pdlab import _kernels


def make_cases():
    rng = np.random.default_rng(7)
    d = 8
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    t = np.ascontiguousarray(g / (np.linalg.norm(g, 2) * 1.05))
    p = np.zeros((d, d), dtype=np.complex128)
    x = np.ones(d, dtype=np.complex128) / np.sqrt(d)
    limit = np.zeros(d, dtype=np.complex128)
    lam = rng.standard_normal(2048) + 1j * rng.standard_normal(2048)
    lam = np.ascontiguousarray(lam / (np.abs(lam).max() * 1.01))
    starts = np.ascontiguousarray(
        rng.standard_normal((d, 16)) + 1j * rng.standard_normal((d, 16)))
    xs = rng.standard_normal((d, 10000)) + 1j * rng.standard_normal((d, 10000))
    xs = np.ascontiguousarray(xs / (np.abs(xs) ** 2).sum(axis=0) ** 0.5)
    return {
        "power_gap_curve (d=8, N=1000)": ("power_gap_curve", (t, p, 1000)),
        "orbit_residuals (d=8, N=5000)": ("orbit_residuals", (t, x, limit, 5000, 2.0)),
        "ritt_curve (d=8, N=1000)": ("ritt_curve", (t, 1000)),
        "zn_sup_curve (2048 pts, N=200)": ("zn_sup_curve", (lam, 200)),
        "pnorm_ascent (d=8, 16 starts)": ("pnorm_ascent", (t, 3.0, starts, 300, 1e-14)),
        "rotation_support (d=8, m=720)": ("rotation_support", (t, 720)),
        "halperin_ratios (d=8, 10^4 samples)": ("halperin_ratios", (t, xs, 2.0, 0.5)),
    }


def time_call(fn, args, repeats):
    fn(*args)  # warm (JIT compile / cache touch)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    jit = _kernels.jit_impls()
    np_impls = _kernels.NUMPY_IMPLS
    cases = make_cases()

    print(f"active backend: {_kernels.BACKEND}")
    if jit is None:
        print("numba unavailable or disabled (PDLAB_NO_NUMBA); "
              "timing the numpy path only\n")
    header = f"{'kernel':38s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for label, (name, call_args) in cases.items():
        t_np = time_call(np_impls[name], call_args, args.repeats)
        if jit is not None:
            t_jit = time_call(jit[name], call_args, args.repeats)
            ratio = t_np / t_jit if t_jit > 0 else float("inf")
            print(f"{label:38s} {t_np * 1e3:9.2f}ms {t_jit * 1e3:9.2f}ms "
                  f"{ratio:7.2f}x")
        else:
            print(f"{label:38s} {t_np * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
