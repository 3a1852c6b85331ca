"""Benchmark the compiled kernels against the pure-numpy reference path.

Run:  python3 benchmarks/bench_kernels.py [--sizes 1000,2000,4000]

The active path follows MGPX_NO_NUMBA; the reference implementations are
always importable, so one process can time both and check agreement.
"""

import argparse
import time

import numpy as np

from mgpx import _kernels


def timer(fn, *args, repeat=3):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_energy(n, rng):
    x = rng.standard_normal((n, 2))
    y = rng.standard_normal((n, 2)) + 0.1
    t_active, a = timer(_kernels.energy_sums, x, y)
    t_ref, b = timer(_kernels.energy_sums_reference, x, y)
    agree = np.allclose(a, b, rtol=1e-10)
    return t_active, t_ref, agree


def bench_pairwise(n, rng):
    x = rng.standard_normal((n, 2))
    t_active, a = timer(_kernels.pairwise_matrix, x)
    t_ref, b = timer(_kernels.pairwise_matrix_reference, x)
    agree = np.allclose(a, b, rtol=1e-10)
    return t_active, t_ref, agree


def bench_exceed(n, rng):
    reps = 200
    z = rng.standard_normal((reps * n, 2))
    u = np.array([1.0, 1.5])
    t_active, a = timer(_kernels.exceed_counts, z, u, reps)
    t_ref, b = timer(_kernels.exceed_counts_reference, z, u, reps)
    agree = bool(np.array_equal(a, b))
    return t_active, t_ref, agree


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,2000,4000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active path: {'numba' if _kernels.USING_NUMBA else 'numpy'}")
    rng = np.random.default_rng(0)

    if _kernels.USING_NUMBA:
        # warm the JIT outside the timed region
        _kernels.energy_sums(np.ones((4, 2)), np.ones((4, 2)))
        _kernels.pairwise_matrix(np.ones((4, 2)))
        _kernels.exceed_counts(np.ones((4, 2)), np.zeros(2), 2)

    header = f"{'kernel':<16}{'n':>8}{'active (s)':>14}{'reference (s)':>16}{'speedup':>10}  agree"
    print(header)
    print("-" * len(header))
    for name, fn in (
        ("energy_sums", bench_energy),
        ("pairwise_matrix", bench_pairwise),
        ("exceed_counts", bench_exceed),
    ):
        for n in sizes:
            t_active, t_ref, agree = fn(n, rng)
            ratio = t_ref / t_active if t_active > 0 else float("inf")
            print(
                f"{name:<16}{n:>8}{t_active:>14.4f}{t_ref:>16.4f}{ratio:>9.1f}x  {agree}"
            )


if __name__ == "__main__":
    main()
