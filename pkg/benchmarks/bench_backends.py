"""Timing comparison of the numba and numpy hot-kernel backends.

Runs the three dispatched kernels (root sweep, batched 3x3 mode solve,
mode-profile superposition) and one end-to-end half-space solve on both
backends, checks that the results agree to roundoff, and prints a table.

Usage: python benchmarks/bench_backends.py [reps]
"""

import sys
import time

import numpy as np

from rotstokes import _accel
from rotstokes.fields import BoundaryTrace
from rotstokes.halfspace import HalfspaceSolution


def timed(fn, reps):
    best = np.inf
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(reps):
    rng = np.random.default_rng(1)
    moduli = 10.0 ** rng.uniform(-3.0, 3.0, size=1 << 18)
    mats = rng.standard_normal((1 << 14, 3, 3)) + 1j * rng.standard_normal((1 << 14, 3, 3))
    mats += 4.0 * np.eye(3)[None]
    rhs = rng.standard_normal((1 << 14, 3, 2)) + 0j
    m = 1 << 12
    lam = np.abs(rng.standard_normal((3, m))) + 0.5 + 0.3j
    coeff = rng.standard_normal((3, m)) + 1j * rng.standard_normal((3, m))
    cols = rng.standard_normal((3, 3, m)) + 0j
    levels = np.linspace(0.0, 3.0, 16)
    trace = BoundaryTrace.random(128, 2.0 * np.pi, seed=5)

    cases = {
        "roots_batch 2^18": lambda: _accel.roots_batch(moduli),
        "solve3_batch 2^14": lambda: _accel.solve3_batch(mats, rhs),
        "mode_profiles 2^12x16": lambda: _accel.mode_profiles(lam, coeff, cols, levels),
        "halfspace solve n=128": lambda: HalfspaceSolution(trace).velocity_levels(levels),
    }

    results = {}
    for name in ("numpy", "numba") if _accel.HAS_NUMBA else ("numpy",):
        _accel.set_backend(name)
        for label, fn in cases.items():
            fn()  # warm up (JIT compile, cache fill)
            results[(name, label)] = timed(fn, reps)

    if _accel.HAS_NUMBA:
        for label in cases:
            a = results[("numpy", label)][1]
            b = results[("numba", label)][1]
            flat_a = np.concatenate([np.ravel(x) for x in (a if isinstance(a, tuple) else (a,))])
            flat_b = np.concatenate([np.ravel(x) for x in (b if isinstance(b, tuple) else (b,))])
            dev = np.max(np.abs(flat_a - flat_b)) / max(np.max(np.abs(flat_b)), 1e-300)
            assert dev <= 1e-13, (label, dev)

    print("%-24s %12s %12s %8s" % ("kernel", "numpy [ms]", "numba [ms]", "speedup"))
    for label in cases:
        tn = results[("numpy", label)][0] * 1e3
        if _accel.HAS_NUMBA:
            tj = results[("numba", label)][0] * 1e3
            print("%-24s %12.2f %12.2f %8.2fx" % (label, tn, tj, tn / tj))
        else:
            print("%-24s %12.2f %12s %8s" % (label, tn, "-", "-"))
    if _accel.HAS_NUMBA:
        print("backends agree to 1e-13 on every case")
    else:
        print("numba not importable: numpy timings only")


if __name__ == "__main__":
    bench(int(sys.argv[1]) if len(sys.argv) > 1 else 5)
