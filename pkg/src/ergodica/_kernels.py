"""Hot numeric kernels: numba-compiled by default, pure numpy on request.

The only genuinely hot inner loop in the package is the cyclic Jacobi sweep
used by the Hermitian eigensolver; everything above it is small dense matrix
algebra that numpy handles directly.  Both implementations perform the same
rotations in the same fixed (row-major) pair order, so each path is
deterministic: identical input bytes give identical output bytes.  Across
paths the results agree to roundoff (the compiled code may round individual
complex products differently), which the test suite pins down after the
eigensolver's canonical sorting and phase fixing.

Select the fallback by setting ERGODICA_NO_NUMBA=1 before import.
"""

import warnings

import numpy as np

from .config import numba_disabled


def _jacobi_sweep_loops(a, v):
    """One cyclic Jacobi sweep on Hermitian `a`, accumulating rotations in `v`.

    For each (p, q) in row-major order over the strict upper triangle, apply
    the plane rotation R = diag(1, e^{-i*phi}) @ G that zeroes a[p, q], where
    a[p, q] = r e^{i*phi} and G is the classical 2x2 symmetric rotation.
    Updates a <- R* a R and v <- v R in place.
    """
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            r2 = apq.real * apq.real + apq.imag * apq.imag
            if r2 == 0.0:
                continue
            r = np.sqrt(r2)
            ph = apq / r
            phc = np.conj(ph)
            app = a[p, p].real
            aqq = a[q, q].real
            tau = (aqq - app) / (2.0 * r)
            if tau >= 0.0:
                t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            sph = s * ph
            sphc = s * phc
            cphc = c * phc
            cph = c * ph
            for i in range(n):
                aip = a[i, p]
                aiq = a[i, q]
                a[i, p] = c * aip - sphc * aiq
                a[i, q] = s * aip + cphc * aiq
            for i in range(n):
                api = a[p, i]
                aqi = a[q, i]
                a[p, i] = c * api - sph * aqi
                a[q, i] = s * api + cph * aqi
            for i in range(n):
                vip = v[i, p]
                viq = v[i, q]
                v[i, p] = c * vip - sphc * viq
                v[i, q] = s * vip + cphc * viq


def _jacobi_sweep_numpy(a, v):
    """Same sweep as `_jacobi_sweep_loops` with vectorized row/column updates."""
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            r2 = apq.real * apq.real + apq.imag * apq.imag
            if r2 == 0.0:
                continue
            r = np.sqrt(r2)
            ph = apq / r
            phc = np.conj(ph)
            app = a[p, p].real
            aqq = a[q, q].real
            tau = (aqq - app) / (2.0 * r)
            if tau >= 0.0:
                t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            sph = s * ph
            sphc = s * phc
            cphc = c * phc
            cph = c * ph
            ap = a[:, p].copy()
            aq = a[:, q].copy()
            a[:, p] = c * ap - sphc * aq
            a[:, q] = s * ap + cphc * aq
            ap = a[p, :].copy()
            aq = a[q, :].copy()
            a[p, :] = c * ap - sph * aq
            a[q, :] = s * ap + cph * aq
            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c * vp - sphc * vq
            v[:, q] = s * vp + cphc * vq


def _subgroup_closure_py(table, seed_elems, membership, elems, count):
    """Product-closure of `seed_elems` in a finite group given by its Cayley table.

    membership (bool[N]) and elems (int32[N]) are scratch output buffers;
    returns the number of elements in the closure.  By Lagrange a subgroup
    of order above N/2 is the whole group, so the loop exits early and fills
    everything once the count passes that bound.  Pure-python twin of the
    compiled kernel; identical traversal order.
    """
    size = table.shape[0]
    for g in seed_elems:
        if not membership[g]:
            membership[g] = True
            elems[count] = g
            count += 1
    head = 0
    while head < count:
        if 2 * count > size:
            for i in range(size):
                membership[i] = True
                elems[i] = i
            return size
        x = elems[head]
        head += 1
        snapshot = count
        for j in range(snapshot):
            m = elems[j]
            y = table[x, m]
            if not membership[y]:
                membership[y] = True
                elems[count] = y
                count += 1
            z = table[m, x]
            if not membership[z]:
                membership[z] = True
                elems[count] = z
                count += 1
    return count


NUMBA_ENABLED = False
jacobi_sweep = _jacobi_sweep_numpy
subgroup_closure = _subgroup_closure_py

if not numba_disabled():
    try:
        import numba

        jacobi_sweep = numba.njit(cache=True)(_jacobi_sweep_loops)
        subgroup_closure = numba.njit(cache=True)(_subgroup_closure_py)
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - exercised only without numba
        warnings.warn(
            "numba unavailable; falling back to the pure-numpy kernels "
            "(set ERGODICA_NO_NUMBA=1 to silence this warning)",
            RuntimeWarning,
        )


def active_path() -> str:
    """Name of the kernel path selected at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"
