#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

The two hot kernels are the per-tau construction of the time-dependent
coefficient matrices (n_max^2 closed-form complex entries) and the reduced
two-mode covariance transform (spectator sum over the truncation range),
both called once or more per fidelity evaluation inside QFI step ladders and
parameter sweeps.

Run:
    python benchmarks/bench_kernels.py [--nmax 50 200 800] [--repeat 200]
"""

import argparse
import time

import numpy as np

from cavqfi import kernels
from cavqfi.cavity import static_matrices


def time_call(fn, args, repeat):
    fn(*args)  # warmup (includes any JIT compilation)
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def bench_series(n_max, repeat):
    omegas = np.pi * 1000.0 * np.arange(1, n_max + 1)
    alpha_s, beta_s = static_matrices(n_max)
    args = (omegas, omegas[0] + omegas[1], 0.731, alpha_s, beta_s)
    rows = {}
    rows["numpy"] = time_call(kernels.time_dependent_coefficients_numpy, args, repeat)
    if kernels.HAVE_NUMBA:
        rows["numba"] = time_call(kernels.time_dependent_coefficients_numba, args, repeat)
    return rows


def bench_reduced(n_max, repeat):
    rng = np.random.default_rng(1)
    alpha_rows = rng.normal(size=(2, n_max)) + 1j * rng.normal(size=(2, n_max))
    beta_rows = rng.normal(size=(2, n_max)) + 1j * rng.normal(size=(2, n_max))
    psi = np.diag([np.exp(2.0), np.exp(-2.0)])
    phi = np.zeros((2, 2))
    args = (alpha_rows, beta_rows, 0, 1, psi, psi, phi)
    rows = {}
    rows["numpy"] = time_call(kernels.reduced_transform_numpy, args, repeat)
    if kernels.HAVE_NUMBA:
        rows["numba"] = time_call(kernels.reduced_transform_numba, args, repeat)
    return rows


def print_table(title, results):
    print(f"\n{title}")
    print(f"{'n_max':>8} {'numpy (us)':>12} {'numba (us)':>12} {'speedup':>9}")
    for n_max, rows in results:
        np_us = rows["numpy"] * 1e6
        if "numba" in rows:
            nb_us = rows["numba"] * 1e6
            print(f"{n_max:>8} {np_us:>12.1f} {nb_us:>12.1f} {np_us / nb_us:>8.1f}x")
        else:
            print(f"{n_max:>8} {np_us:>12.1f} {'n/a':>12} {'n/a':>9}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nmax", type=int, nargs="+", default=[50, 200, 800])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    print(f"selected backend: {kernels.active_backend()}")
    if not kernels.HAVE_NUMBA:
        print("numba unavailable or disabled (CAVQFI_KERNELS); timing numpy only")

    print_table(
        "time-dependent coefficient matrices (per tau)",
        [(n, bench_series(n, args.repeat)) for n in args.nmax],
    )
    print_table(
        "reduced two-mode transform (per fidelity evaluation)",
        [(n, bench_reduced(n, max(args.repeat, 500))) for n in args.nmax],
    )


if __name__ == "__main__":
    main()
