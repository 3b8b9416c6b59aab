"""Time the two slice-propagation kernels against each other.

    python3 benchmarks/bench_kernels.py [--sizes 1024,8192,65536] [--repeat 20]

Prints one row per slice count with the best-of-N time for each backend,
the speed-up, and the largest relative disagreement between them.
"""
import argparse
import timeit

import numpy as np

from mazer import _accel
from mazer.profiles import make_profile
from mazer.scattering import (Channel, SolverConfig, clear_cache, kernel_backends, propagate_with,
                              scatter_transfer_matrix)


def slices(size, seed=0):
    # mix of propagating and evanescent slices, like a barrier channel near its top
    rng = np.random.default_rng(seed)
    return rng.uniform(-2.0, 1.0, size), 10.0 / size


def kernel_table(sizes, repeat):
    backends = kernel_backends()
    print(f"{'slices':>8} " + " ".join(f"{b + ' [ms]':>12}" for b in backends)
          + f" {'speed-up':>9} {'max rel diff':>13}")
    for size in sizes:
        Q, h = slices(size)
        times, results = {}, {}
        for b in backends:
            propagate_with(b, Q, h, 0.3)  # compile / warm up
            times[b] = min(timeit.repeat(lambda: propagate_with(b, Q, h, 0.3), number=1,
                                         repeat=repeat)) * 1e3
            results[b] = propagate_with(b, Q, h, 0.3)
        row = f"{size:>8} " + " ".join(f"{times[b]:>12.3f}" for b in backends)
        if len(backends) == 2:
            (v0, v1, la), (w0, w1, lb) = results["numba"], results["numpy"]
            a = np.array([v0, v1]) * np.exp(la - lb)
            diff = float(np.max(np.abs(a - [w0, w1])) / np.max(np.abs([w0, w1])))
            row += f" {times['numpy'] / times['numba']:>9.1f} {diff:>13.1e}"
        print(row)


def solver_timing(repeat):
    p = make_profile("sech2", 10.0)
    cfg = SolverConfig()
    print(f"\nfull transfer-matrix solve, sech2, segments={cfg.segments} (+ doubling)")
    original = _accel.USE_NUMBA
    try:
        for use_numba in ((True, False) if _accel.NUMBA_AVAILABLE else (False,)):
            _accel.USE_NUMBA = use_numba
            clear_cache()
            scatter_transfer_matrix(p, Channel(3, "+"), 0.4, cfg)
            best = min(timeit.repeat(lambda: scatter_transfer_matrix(p, Channel(3, "+"), 0.4, cfg),
                                     number=1, repeat=repeat))
            print(f"  {'numba' if use_numba else 'numpy':>6}: {best * 1e3:.3f} ms per channel")
    finally:
        _accel.USE_NUMBA = original


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1024,8192,65536,524288")
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    print(f"dispatch backend in this process: {_accel.backend_name()}\n")
    kernel_table([int(s) for s in args.sizes.split(",")], args.repeat)
    solver_timing(args.repeat)


if __name__ == "__main__":
    main()
