"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Compilation happens in a warm-up call and is reported separately.  Both
backends must produce identical arrays; the script exits 1 otherwise.
"""

import argparse
import sys
import time
from fractions import Fraction

import numpy as np

from torus_transit import _kernels, family, simulate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=10 ** 6)
    ap.add_argument("--length", type=int, default=10 ** 6)
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--depth", type=int, default=40)
    args = ap.parse_args()

    sys_ = family.build_theorem3(family.Theorem3Params(2, 3, Fraction(3, 4)))
    packed = simulate.pack(sys_)
    frame = simulate.surface_frame(sys_)
    pts = np.random.default_rng(0).random((args.points, 2))
    theta = np.array([simulate._theta(sys_, frame, p, args.depth)
                      for p in simulate.grid_points(1, args.grid)])

    cases = {
        f"eval_batch ({args.points} points)":
            lambda be: _kernels.eval_batch(pts, packed, be),
        f"orbit ({args.length} steps)":
            lambda be: _kernels.orbit_lattice(np.array([12345]), 0.25, args.length, packed, be),
        f"pullback ({args.grid} x depth {args.depth})":
            lambda be: _kernels.pullback_intervals(theta, frame.offset, sys_.fiber_eigenvalue,
                                                   frame.k1, frame.k2, packed, be),
    }
    if not _kernels.HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return 0

    failed = False
    print(f"{'kernel':36} {'compile':>9} {'numba':>9} {'numpy':>9} {'speedup':>8}")
    for name, fn in cases.items():
        t = time.perf_counter()
        fn("numba")
        compile_s = time.perf_counter() - t
        nb_s, nb_out = best_of(lambda: fn("numba"), args.repeat)
        np_s, np_out = best_of(lambda: fn("numpy"), args.repeat)
        same = np.array_equal(nb_out, np_out)
        failed |= not same
        print(f"{name:36} {compile_s:9.3f} {nb_s:9.4f} {np_s:9.4f} {np_s / nb_s:7.1f}x"
              + ("" if same else "  MISMATCH"))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
