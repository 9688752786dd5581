"""Timing comparison of the transport kernels.

Runs the compiled and the numpy transport sweep on identical random
grids and reports per-step wall time, speedup, and the largest
deviation between the two updates (expected: exactly zero).

Usage: python3 benchmarks/kernel_benchmark.py [--cells N] [--steps K]
"""

import argparse
import time

import numpy as np

from hymo.solver1d import max_speed_factor, transport_backends


def random_grid(rng, n, M):
    W = np.empty((n, M + 1))
    W[:, 0] = rng.uniform(0.5, 2.0, n)
    W[:, 1] = rng.uniform(-1.0, 1.0, n)
    W[:, 2] = rng.uniform(0.5, 2.0, n)
    W[:, 3:] = rng.normal(0.0, 0.05, (n, M - 2))
    return W


def time_kernel(kernel, W, dx, dt, cmax, steps):
    kernel(W, dx, dt, cmax, True)  # warm up
    t0 = time.perf_counter()
    for _ in range(steps):
        kernel(W, dx, dt, cmax, True)
    return (time.perf_counter() - t0) / steps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", type=int, default=20000)
    parser.add_argument("--steps", type=int, default=50)
    args = parser.parse_args()

    backends = transport_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{args.cells} cells, {args.steps} steps per measurement")
    print(f"{'M':>3} {'numpy (ms)':>12} {'compiled (ms)':>14} "
          f"{'speedup':>8} {'max |diff|':>11}")
    for M in (3, 5, 8, 12):
        W = random_grid(rng, args.cells, M)
        dx = 1.0 / args.cells
        cmax = max_speed_factor(M)
        dt = 0.4 * dx / (1.0 + cmax * np.sqrt(2.0))
        t_np = time_kernel(backends["numpy"], W, dx, dt, cmax, args.steps)
        t_cy = time_kernel(backends["compiled"], W, dx, dt, cmax, args.steps)
        diff = np.abs(backends["numpy"](W, dx, dt, cmax, True)
                      - backends["compiled"](W, dx, dt, cmax, True)).max()
        print(f"{M:>3} {t_np * 1e3:>12.3f} {t_cy * 1e3:>14.3f} "
              f"{t_np / t_cy:>8.2f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
