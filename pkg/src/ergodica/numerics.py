"""Deterministic dense complex linear algebra with an explicit tolerance policy.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype complex128; a matrix
JSON encoding (list of rows, each entry ``[re, im]``) lives in
:mod:`ergodica.serialize`.  All reductions run in fixed canonical order and
the eigensolver is a self-contained cyclic Jacobi iteration, so every routine
here is bit-deterministic for a given kernel path: identical input bytes give
identical output bytes.

Two tolerances govern everything above this module:

* ``atol`` separates arithmetic noise from zero.
* ``rank_tol`` governs structural rank/support decisions and eigenvalue
  clustering; it is deliberately coarser than ``atol``.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import jacobi_sweep
from .errors import (
    InternalError,
    NotHermitianError,
    NotPSDError,
    NotSquareError,
    SingularMatrixError,
)

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "dagger",
    "max_abs",
    "frobenius",
    "trace_inner",
    "hermitian_eigendecomposition",
    "support_projection_of_psd",
    "antilinear_polar_decomposition",
    "orthonormalize_matrices",
    "nullspace_from_gram",
    "psd_function",
    "psd_inverse_sqrt",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerance policy shared across the package.

    Attributes
    ----------
    atol : float
        Absolute tolerance for arithmetic residuals (default 1e-10).
    rank_tol : float
        Eigenvalue threshold for rank, support, and clustering decisions
        (default 1e-8).  Always strictly coarser than ``atol``.
    """

    atol: float = 1e-10
    rank_tol: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.atol < self.rank_tol < 1.0):
            raise ValueError(
                f"tolerances must satisfy 0 < atol < rank_tol < 1, "
                f"got atol={self.atol}, rank_tol={self.rank_tol}"
            )


DEFAULT_TOL = ToleranceConfig()

_MAX_SWEEPS = 64


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-D complex128 array (copying only when needed)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise NotSquareError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.swapaxes(m, -1, -2))


def max_abs(m) -> float:
    a = np.asarray(m)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def frobenius(m) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(m)) ** 2)))


def trace_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Trace inner product <A, B> = trace(A* B)."""
    return complex(np.sum(np.conj(a) * b))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product (einsum-based; faster than numpy's for small blocks)."""
    na, ma = a.shape
    nb, mb = b.shape
    return np.einsum("ij,kl->ikjl", a, b).reshape(na * nb, ma * mb)


def commutation_gram(operators, dim: int) -> np.ndarray:
    """Gram matrix of the stacked superoperators X -> XY - YX over `operators`.

    The null space of the result is the joint commutant of the family inside
    the full matrix algebra on C^dim.
    """
    eye = np.eye(dim, dtype=np.complex128)
    gram = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for y in operators:
        y = np.asarray(y, dtype=np.complex128)
        c = kron(eye, y.T) - kron(y, eye)
        gram += dagger(c) @ c
    return gram


def _offdiag_frobenius(a: np.ndarray) -> float:
    m = np.abs(a)
    m *= m
    np.fill_diagonal(m, 0.0)
    return float(np.sqrt(np.sum(m)))


def hermitian_eigendecomposition(m, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Square matrix with ``max |M - M*| <= atol``.
    tol : ToleranceConfig

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues ascending (real 1-D array); eigenvectors as orthonormal
        columns with ``M = V diag(w) V*`` to roughly ``100*atol``.

    Notes
    -----
    Determinism conventions: the sweep visits pairs in row-major order and
    stops once the off-diagonal Frobenius mass drops below
    ``atol * max(1, ||M||_F)``; eigenvalues are sorted by a stable sort;
    clusters of eigenvalues closer than ``rank_tol`` are re-orthonormalized
    by Gram-Schmidt in index order; each eigenvector's first component of
    magnitude above ``rank_tol`` is made real positive.

    Raises
    ------
    NotSquareError, NotHermitianError
    """
    a = as_matrix(m)
    n, ncol = a.shape
    if n != ncol:
        raise NotSquareError(f"matrix is {n}x{ncol}")
    if max_abs(a - dagger(a)) > tol.atol:
        raise NotHermitianError(
            f"symmetry residual {max_abs(a - dagger(a)):.3e} exceeds atol={tol.atol:.1e}"
        )
    a = 0.5 * (a + dagger(a))
    if n == 1:
        return a.diagonal().real.copy(), np.eye(1, dtype=np.complex128)
    v = np.eye(n, dtype=np.complex128)
    threshold = tol.atol * max(1.0, frobenius(a))
    sweeps = 0
    while _offdiag_frobenius(a) > threshold:
        jacobi_sweep(a, v)
        sweeps += 1
        if sweeps > _MAX_SWEEPS:
            raise InternalError("Jacobi iteration failed to converge")
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    _canonicalize_eigenvectors(w, v, tol)
    return w, v


def _canonicalize_eigenvectors(w: np.ndarray, v: np.ndarray, tol: ToleranceConfig):
    """Gram-Schmidt within degenerate clusters, then fix column phases, in place."""
    n = len(w)
    close = np.diff(w) < tol.rank_tol
    if np.any(close):
        boundaries = [0] + [i + 1 for i in range(n - 1) if not close[i]] + [n]
        for start, stop in zip(boundaries, boundaries[1:]):
            if stop - start < 2:
                continue
            block = v[:, start:stop]
            defect = max_abs(dagger(block) @ block - np.eye(stop - start))
            if defect <= 1e-13:
                # already orthonormal; Gram-Schmidt in index order would
                # reproduce the columns up to the same roundoff
                continue
            for b in range(start, stop):
                col = v[:, b]
                for c in range(start, b):
                    col = col - v[:, c] * (np.conj(v[:, c]) @ col)
                nrm = np.sqrt(np.real(np.vdot(col, col)))
                if nrm <= tol.rank_tol:
                    raise InternalError("degenerate cluster collapsed in Gram-Schmidt")
                v[:, b] = col / nrm
    mags = np.abs(v)
    pivots_idx = np.argmax(mags > tol.rank_tol, axis=0)
    pivots = v[pivots_idx, np.arange(n)]
    v *= np.conj(pivots) / np.abs(pivots)


def support_projection_of_psd(m, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the range of a PSD matrix.

    Eigenvalues above ``rank_tol`` count as support; an eigenvalue below
    ``-rank_tol`` raises :class:`NotPSDError`.
    """
    a = as_matrix(m)
    w, v = hermitian_eigendecomposition(a, tol)
    if w.size and w[0] < -tol.rank_tol:
        raise NotPSDError(f"negative eigenvalue {w[0]:.3e} below -rank_tol")
    keep = w > tol.rank_tol
    vk = v[:, keep]
    return vk @ dagger(vk)


def antilinear_polar_decomposition(k, tol: ToleranceConfig = DEFAULT_TOL):
    """Polar-decompose the antilinear map S(x) = K conj(x) as S = J Delta^(1/2).

    Returns ``(J, DeltaHalf)`` where ``Delta = S* S`` acts linearly as
    ``K^T conj(K)``, ``DeltaHalf`` is its positive square root, and the
    antiunitary part acts as ``x -> J conj(x)``.  The reconstruction
    ``K = J conj(DeltaHalf)`` holds to roughly ``100*atol``.  When S is an
    antilinear involution (``K conj(K) = I``, the case produced by modular
    theory) J satisfies ``J conj(J) = I``; for general invertible K the
    polar part need not be an involution.

    Raises
    ------
    SingularMatrixError
        If K is not invertible at ``rank_tol``.
    """
    km = as_matrix(k)
    n, ncol = km.shape
    if n != ncol:
        raise NotSquareError(f"matrix is {n}x{ncol}")
    delta = km.T @ np.conj(km)
    delta = 0.5 * (delta + dagger(delta))
    w, v = hermitian_eigendecomposition(delta, tol)
    scale = max(1.0, float(np.sqrt(max(w[-1], 0.0)))) if w.size else 1.0
    if w.size == 0 or np.sqrt(max(w[0], 0.0)) <= tol.rank_tol * scale:
        raise SingularMatrixError("K is singular at rank_tol")
    sq = np.sqrt(w)
    delta_half = (v * sq) @ dagger(v)
    inv_half = (v * (1.0 / sq)) @ dagger(v)
    j = km @ np.conj(inv_half)
    return j, delta_half


def orthonormalize_matrices(mats, ambient_dim: int, tol: ToleranceConfig = DEFAULT_TOL):
    """Orthonormalize matrices under the trace inner product.

    Twice-iterated Gram-Schmidt in input order (projection against the
    accepted basis, repeated, which restores orthogonality to roundoff);
    vectors whose residual norm falls at or below ``rank_tol`` are dropped.
    Returns a (k, n, n) array; input order of the surviving directions is
    preserved, which keeps span construction deterministic.
    """
    n = ambient_dim
    rows = []
    basis_mat = None
    for m in mats:
        vec = np.asarray(m, dtype=np.complex128).reshape(n * n)
        if rows:
            if basis_mat is None or basis_mat.shape[0] != len(rows):
                basis_mat = np.stack(rows)
            for _ in range(2):
                vec = vec - basis_mat.T @ (np.conj(basis_mat) @ vec)
        nrm = np.sqrt(np.real(np.vdot(vec, vec)))
        if nrm > tol.rank_tol:
            rows.append(vec / nrm)
            basis_mat = None
    if not rows:
        return np.zeros((0, n, n), dtype=np.complex128)
    return np.stack(rows).reshape(-1, n, n)


def nullspace_from_gram(gram: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal null-space basis of a PSD Gram matrix.

    An eigenvalue counts as null when it is at most ``rank_tol`` times the
    matrix scale ``max(1, largest eigenvalue)``.  The relative scaling keeps
    the decision meaningful for Gram matrices of any magnitude and safely
    above the eigensolver's accuracy floor (order ``n * eps * scale``); the
    structural problems this serves have cleanly bimodal spectra, so the
    window between the floor and the threshold is wide.  Returns the null
    vectors as columns.
    """
    g = 0.5 * (gram + dagger(gram))
    w, v = hermitian_eigendecomposition(g, tol)
    w = np.maximum(w, 0.0)
    scale = max(1.0, float(w[-1])) if w.size else 1.0
    null = w <= tol.rank_tol * scale
    return v[:, null]


def psd_function(m, fn, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = hermitian_eigendecomposition(m, tol)
    return (v * fn(w)) @ dagger(v)


def psd_inverse_sqrt(m, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Inverse square root of a PSD matrix on its support, zero on the kernel."""
    w, v = hermitian_eigendecomposition(m, tol)
    scale = max(1.0, float(w[-1])) if w.size else 1.0
    vals = np.where(w > tol.rank_tol * scale, 1.0 / np.sqrt(np.maximum(w, 1e-300)), 0.0)
    return (v * vals) @ dagger(v)
