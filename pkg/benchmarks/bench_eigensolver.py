"""Benchmark the cyclic Jacobi eigensolver on both kernel paths.

Runs the full eigendecomposition (sweeps + canonicalization) over seeded
Hermitian matrices with the numba-compiled sweep and with the pure-numpy
sweep, reports timings, and checks cross-path agreement after the canonical
sorting and phase fixing.

Usage: python benchmarks/bench_eigensolver.py [--dims 8,16,32,64,96] [--reps 3]
"""

import argparse
import time

import numpy as np

from ergodica import _kernels
import ergodica.numerics as numerics
from ergodica.numerics import hermitian_eigendecomposition


def _run_with(sweep, h):
    saved = numerics.jacobi_sweep
    numerics.jacobi_sweep = sweep
    try:
        start = time.perf_counter()
        w, v = hermitian_eigendecomposition(h)
        return time.perf_counter() - start, w, v
    finally:
        numerics.jacobi_sweep = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="8,16,32,64,96")
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1729)
    args = parser.parse_args()
    dims = [int(d) for d in args.dims.split(",")]
    rng = np.random.default_rng(args.seed)

    if _kernels.NUMBA_ENABLED:
        warm = np.eye(4, dtype=np.complex128)
        _kernels.jacobi_sweep(warm.copy(), warm.copy())  # compile outside timing
        compiled = _kernels.jacobi_sweep
    else:
        print("numba path unavailable (ERGODICA_NO_NUMBA set or numba missing); "
              "timing the numpy path against itself")
        compiled = _kernels._jacobi_sweep_numpy

    print(f"{'n':>4} {'numba [ms]':>12} {'numpy [ms]':>12} {'speedup':>8} {'max dev':>10}")
    for n in dims:
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = 0.5 * (x + x.conj().T)
        t_jit = min(_run_with(compiled, h)[0] for _ in range(args.reps))
        t_np, w_np, v_np = min(
            (_run_with(_kernels._jacobi_sweep_numpy, h) for _ in range(args.reps)),
            key=lambda r: r[0])
        _, w_jit, v_jit = _run_with(compiled, h)
        dev = max(float(np.max(np.abs(w_jit - w_np))),
                  float(np.max(np.abs(v_jit - v_np))))
        print(f"{n:>4} {t_jit * 1e3:>12.2f} {t_np * 1e3:>12.2f} "
              f"{t_np / max(t_jit, 1e-12):>8.1f} {dev:>10.2e}")


if __name__ == "__main__":
    main()
