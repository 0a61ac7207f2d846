#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernel paths.

Usage: python benchmarks/bench_kernels.py [--iterations N]
"""
import argparse
import time

import numpy as np

from sqkd import _kernels


def timeit(fn, repeat):
    fn()  # warm up (JIT compile on first call)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_jacobi(n, repeat, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g + g.conj().T
    tol = 1e-14 * np.linalg.norm(m)
    out = {}
    for name, fn in (("numba", _kernels.jacobi_jit), ("numpy", _kernels.jacobi_numpy)):
        out[name] = timeit(lambda: fn(m.copy(), np.eye(n, dtype=complex), tol, 100), repeat)
    return out


def bench_tally(iterations, repeat, rng):
    u = rng.random((iterations, 4))
    p_one = rng.random((3, 2))
    out = {}
    for name, fn in (("numba", _kernels.tally_jit), ("numpy", _kernels.tally_numpy)):
        counts = np.zeros((3, 2, 2), dtype=np.int64)
        out[name] = timeit(lambda: fn(u, p_one, 0.5, counts), repeat)
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--iterations", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    rows = [(f"jacobi n={n}", bench_jacobi(n, args.repeat, rng)) for n in (2, 4, 8, 16)]
    rows.append((f"tally n={args.iterations:.0e}", bench_tally(args.iterations, max(1, args.repeat // 4), rng)))
    for label, t in rows:
        print(f"{label:<22}{t['numba'] * 1e3:>12.4f}{t['numpy'] * 1e3:>12.4f}{t['numpy'] / t['numba']:>10.1f}x")


if __name__ == "__main__":
    main()
