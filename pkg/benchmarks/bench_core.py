"""Benchmark: compiled stencil core vs the numpy fallback.

Runs the ensemble-critical kernel (batched separable-forcing evolution)
at the reference resolution and prints per-path timings for both
backends plus the speedup.  Usage:

    python benchmarks/bench_core.py [--paths 64] [--n-t 8192] [--n-x 100]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fracwave import _fdpy

try:
    from fracwave import _fdcore
except ImportError:
    _fdcore = None


def time_batch(impl, fx, gx, alpha, betas, r2, ht2, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        tic = time.perf_counter()
        impl.fd_evolve_sep_batch(fx, gx, alpha, betas, r2, ht2, False)
        best = min(best, time.perf_counter() - tic)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=64)
    parser.add_argument("--n-t", type=int, default=2**13)
    parser.add_argument("--n-x", type=int, default=100)
    args = parser.parse_args()

    x = np.linspace(0.0, np.pi, args.n_x + 1)
    fx = np.sin(3.0 * x)
    gx = np.exp(-((x - np.pi / 2.0) ** 2))
    fx[0] = fx[-1] = gx[0] = gx[-1] = 0.0
    alpha = np.ones(args.n_t + 1)
    rng = np.random.default_rng(0)
    h_t = 1.0 / args.n_t
    betas = rng.standard_normal((args.paths, args.n_t + 1)) * h_t**-0.5
    betas[:, 0] = 0.0
    r2 = (h_t / (np.pi / args.n_x)) ** 2
    ht2 = h_t**2

    print(
        f"batched stencil, {args.paths} paths, n_t={args.n_t}, n_x={args.n_x}"
    )
    t_py = time_batch(_fdpy, fx, gx, alpha, betas, r2, ht2)
    print(f"  numpy fallback : {t_py:8.3f} s  ({t_py / args.paths * 1e3:7.2f} ms/path)")
    if _fdcore is None:
        print("  compiled core  : not built")
        return 0
    t_cy = time_batch(_fdcore, fx, gx, alpha, betas, r2, ht2)
    print(f"  compiled core  : {t_cy:8.3f} s  ({t_cy / args.paths * 1e3:7.2f} ms/path)")
    print(f"  speedup        : {t_py / t_cy:.1f}x")

    a, _ = _fdpy.fd_evolve_sep_batch(fx, gx, alpha, betas, r2, ht2, False)
    b, _ = _fdcore.fd_evolve_sep_batch(fx, gx, alpha, betas, r2, ht2, False)
    print(f"  final fields bit-identical: {np.array_equal(a, b)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
