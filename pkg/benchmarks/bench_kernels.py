"""Time the set-level LLP matrix over a bounded universe with both backends.

    python benchmarks/bench_kernels.py [--universe-max 4] [--repeat 5]

The numba timing excludes the first (compiling) call.
"""
import argparse
import time

import numpy as np

from flowcalc import kernels
from flowcalc.finset import enumerate_universe


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--universe-max", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    U = [(f.indices, len(f.codomain)) for f in enumerate_universe(args.universe_max)]
    print(f"universe-max {args.universe_max}: {len(U)} arrows, {len(U) ** 2} pairs")

    t_np, m_np = best_of(lambda: kernels.set_llp_matrix(U, U, backend="numpy"), args.repeat)
    print(f"numpy : {t_np * 1e3:9.2f} ms")
    if not kernels.NUMBA_ENABLED:
        print("numba : disabled (FLOWCALC_DISABLE_NUMBA set or numba missing)")
        return
    t0 = time.perf_counter()
    kernels.set_llp_matrix(U[:1], U[:1], backend="numba")
    print(f"numba compile: {(time.perf_counter() - t0) * 1e3:.1f} ms")
    t_nb, m_nb = best_of(lambda: kernels.set_llp_matrix(U, U, backend="numba"), args.repeat)
    print(f"numba : {t_nb * 1e3:9.2f} ms  (x{t_np / t_nb:.1f})")
    assert np.array_equal(m_np, m_nb), "backends disagree"


if __name__ == "__main__":
    main()
