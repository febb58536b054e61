"""Finite-dimensional von Neumann algebras as *-closed unital linear spans.

An algebra is stored as an orthonormal basis under the trace inner product
``<A, B> = trace(A* B)``; with that representation membership tests and
closure computations are plain orthogonal projections, and every structural
decision (rank, block splitting, null spaces) runs through the deterministic
eigensolver in :mod:`ergodica.numerics`.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_SEED
from .errors import (
    ClusteringAmbiguousError,
    DimensionMismatchError,
    InternalError,
    NotInAlgebraError,
)
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    commutation_gram,
    dagger,
    hermitian_eigendecomposition,
    max_abs,
    nullspace_from_gram,
    orthonormalize_matrices,
    psd_inverse_sqrt,
)

__all__ = [
    "OperatorAlgebra",
    "CentralDecomposition",
    "algebra_from_basis",
    "generate_algebra",
    "full_matrix_algebra",
    "diagonal_algebra",
    "block_algebra",
    "coefficients_of",
    "element_from_coefficients",
    "project_to_span",
    "contains",
    "commutant",
    "center_and_blocks",
    "mvn_equivalent",
    "cutdown",
    "hermitian_basis",
    "spans_equal",
    "is_projection",
    "random_element",
    "random_hermitian_element",
]


@dataclass
class OperatorAlgebra:
    """A unital *-closed, multiplicatively closed span of complex matrices.

    Treat instances as immutable after construction.  ``basis`` has shape
    (dim, n, n) and is orthonormal under the trace inner product.
    """

    ambient_dim: int
    basis: np.ndarray
    contains_identity: bool = True
    _basis_vec: np.ndarray = field(default=None, repr=False, compare=False)
    _herm_basis: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def basis_vec(self) -> np.ndarray:
        """Basis flattened to rows of length n^2 (row-major)."""
        if self._basis_vec is None:
            n = self.ambient_dim
            self._basis_vec = self.basis.reshape(self.dim, n * n)
        return self._basis_vec

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=np.complex128)


def _validate_algebra(alg: OperatorAlgebra, tol: ToleranceConfig):
    n = alg.ambient_dim
    eye = np.eye(n, dtype=np.complex128)
    if residual_norm(alg, eye) > tol.atol * n:
        raise InternalError("identity is not in the span")
    for b in alg.basis:
        if residual_norm(alg, dagger(b)) > tol.atol * n:
            raise InternalError("span is not *-closed")
    prods = np.einsum("aij,bjk->abik", alg.basis, alg.basis).reshape(-1, n, n)
    for p in prods:
        if residual_norm(alg, p) > tol.atol * n:
            raise InternalError("span is not multiplicatively closed")


def algebra_from_basis(basis, ambient_dim: int, tol: ToleranceConfig = DEFAULT_TOL,
                       validate: bool = True) -> OperatorAlgebra:
    """Wrap an orthonormal basis (re-orthonormalizing defensively) as an algebra."""
    ortho = orthonormalize_matrices(basis, ambient_dim, tol)
    alg = OperatorAlgebra(ambient_dim=ambient_dim, basis=ortho)
    if validate:
        _validate_algebra(alg, tol)
    return alg


def generate_algebra(generators, ambient_dim: int,
                     tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """Smallest unital *-closed multiplicatively closed span containing the generators.

    Alternates adjoining pairwise products (and adjoints) with
    re-orthonormalization until the span dimension stabilizes.  The span
    dimension is monotone and bounded by n^2, so stabilization within n^2
    rounds is guaranteed; exceeding the cap is an internal error.
    """
    n = ambient_dim
    seed = [np.eye(n, dtype=np.complex128)]
    for g in generators:
        g = np.asarray(g, dtype=np.complex128)
        if g.shape != (n, n):
            raise DimensionMismatchError(f"generator has shape {g.shape}, expected {(n, n)}")
        seed.append(g)
        seed.append(dagger(g))
    basis = orthonormalize_matrices(seed, n, tol)
    for _ in range(n * n + 1):
        k = basis.shape[0]
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(k * k, n, n)
        candidates = list(basis) + list(prods) + [dagger(p) for p in prods]
        new_basis = orthonormalize_matrices(candidates, n, tol)
        if new_basis.shape[0] == k:
            alg = OperatorAlgebra(ambient_dim=n, basis=new_basis)
            _validate_algebra(alg, tol)
            return alg
        basis = new_basis
    raise InternalError("algebra closure failed to stabilize within n^2 rounds")


def full_matrix_algebra(n: int, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """All of M_n, with the matrix-unit orthonormal basis."""
    basis = np.zeros((n * n, n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            basis[a * n + b, a, b] = 1.0
    return OperatorAlgebra(ambient_dim=n, basis=basis)


def diagonal_algebra(n: int, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """The maximal abelian algebra of diagonal matrices on C^n."""
    basis = np.zeros((n, n, n), dtype=np.complex128)
    for a in range(n):
        basis[a, a, a] = 1.0
    return OperatorAlgebra(ambient_dim=n, basis=basis)


def block_algebra(blocks, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """Direct sum of full matrix factors, each with a multiplicity.

    `blocks` is a sequence of (dim, multiplicity) pairs; block i contributes
    dim_i * multiplicity_i to the ambient dimension and acts as
    M_{dim_i} (x) I_{multiplicity_i}.
    """
    blocks = [(int(d), int(m)) for d, m in blocks]
    n = sum(d * m for d, m in blocks)
    basis = []
    offset = 0
    for d, m in blocks:
        norm = 1.0 / np.sqrt(m)
        for a in range(d):
            for b in range(d):
                mat = np.zeros((n, n), dtype=np.complex128)
                for t in range(m):
                    mat[offset + t * d + a, offset + t * d + b] = norm
                basis.append(mat)
        offset += d * m
    return algebra_from_basis(basis, n, tol, validate=False)


def coefficients_of(alg: OperatorAlgebra, x) -> np.ndarray:
    """Coefficients of the orthogonal projection of X onto the span."""
    xv = np.asarray(x, dtype=np.complex128).reshape(-1)
    if xv.size != alg.ambient_dim ** 2:
        raise DimensionMismatchError("element has wrong ambient dimension")
    return np.conj(alg.basis_vec) @ xv


def element_from_coefficients(alg: OperatorAlgebra, coeffs) -> np.ndarray:
    n = alg.ambient_dim
    return (np.asarray(coeffs, dtype=np.complex128) @ alg.basis_vec).reshape(n, n)


def project_to_span(alg: OperatorAlgebra, x) -> np.ndarray:
    return element_from_coefficients(alg, coefficients_of(alg, x))


def residual_norm(alg: OperatorAlgebra, x) -> float:
    """Max-abs residual of X against its span projection."""
    return max_abs(np.asarray(x, dtype=np.complex128) - project_to_span(alg, x))


def contains(alg: OperatorAlgebra, x, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether X lies in the span, up to atol scaled by the element size."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (alg.ambient_dim, alg.ambient_dim):
        raise DimensionMismatchError(f"element has shape {x.shape}")
    return residual_norm(alg, x) <= tol.atol * (1.0 + max_abs(x))


def _left_multiplication_matrix(alg: OperatorAlgebra, x) -> np.ndarray:
    """Coefficient matrix of Y -> X Y restricted to the span."""
    prods = np.asarray(x, dtype=np.complex128) @ alg.basis
    return np.conj(alg.basis_vec) @ prods.reshape(alg.dim, -1).T


def commutant(alg: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL,
              extra_operators=()) -> OperatorAlgebra:
    """Relative commutant {X : XB = BX for every basis element B} in M_n.

    Computed as the null space of the stacked superoperators
    X -> XB - BX over the basis (plus any `extra_operators`), accumulated
    into a Gram matrix on the n^2-dimensional matrix space.
    """
    n = alg.ambient_dim
    ops = list(alg.basis) + [np.asarray(o, dtype=np.complex128) for o in extra_operators]
    null = nullspace_from_gram(commutation_gram(ops, n), tol)
    mats = [null[:, j].reshape(n, n) for j in range(null.shape[1])]
    return algebra_from_basis(mats, n, tol, validate=False)


@dataclass
class CentralDecomposition:
    """Minimal central projections and per-block (matrix size, multiplicity)."""

    minimal_central_projections: list
    block_dims: list

    @property
    def num_blocks(self) -> int:
        return len(self.minimal_central_projections)


def _center_coefficient_basis(alg: OperatorAlgebra, tol: ToleranceConfig) -> np.ndarray:
    """Orthonormal coefficient vectors spanning the center, via a null space."""
    k = alg.dim
    gram = np.zeros((k, k), dtype=np.complex128)
    for b in alg.basis:
        left = _left_multiplication_matrix(alg, b)
        prods = alg.basis @ b
        right = np.conj(alg.basis_vec) @ prods.reshape(k, -1).T
        c = left - right
        gram += dagger(c) @ c
    return nullspace_from_gram(gram, tol)


def center_and_blocks(alg: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL,
                      seed: int = DEFAULT_SEED) -> CentralDecomposition:
    """Split the algebra along its center into matrix blocks.

    The minimal central projections are recovered by eigen-clustering a
    seeded random self-adjoint central element; an eigenvalue gap inside
    (atol, rank_tol) is ambiguous and raises rather than merging silently.
    Blocks are returned in a seed-independent canonical order (sorted by
    rank, then by the rounded diagonal pattern of the projection).
    """
    n = alg.ambient_dim
    center_coeffs = _center_coefficient_basis(alg, tol)
    c = center_coeffs.shape[1]
    herm = []
    for j in range(c):
        z = element_from_coefficients(alg, center_coeffs[:, j])
        herm.append(0.5 * (z + dagger(z)))
        herm.append((z - dagger(z)) / 2j)
    herm = orthonormalize_matrices(herm, n, tol)
    if herm.shape[0] != c:
        raise InternalError("center hermitian basis has unexpected dimension")
    rng = np.random.default_rng(seed)
    for _ in range(8):
        coeffs = rng.standard_normal(c)
        z = np.tensordot(coeffs, herm, axes=1)
        w, v = hermitian_eigendecomposition(z, tol)
        gaps = np.diff(w)
        if np.any((gaps > tol.atol) & (gaps < tol.rank_tol)):
            raise ClusteringAmbiguousError(
                "central eigenvalue gap falls between atol and rank_tol"
            )
        boundaries = [0] + [i + 1 for i, g in enumerate(gaps) if g >= tol.rank_tol] + [n]
        clusters = [(boundaries[i], boundaries[i + 1]) for i in range(len(boundaries) - 1)]
        if len(clusters) == c:
            break
    else:
        raise ClusteringAmbiguousError("could not split the center into minimal projections")

    projections = []
    for lo, hi in clusters:
        vk = v[:, lo:hi]
        projections.append(vk @ dagger(vk))
    projections.sort(
        key=lambda p: (round(p.trace().real), tuple(np.round(p.diagonal().real, 6)))
    )

    block_dims = []
    for p in projections:
        rank = int(round(p.trace().real))
        cut = orthonormalize_matrices([p @ b @ p for b in alg.basis], n, tol)
        d = cut.shape[0]
        size = int(round(np.sqrt(d)))
        if size * size != d or rank % size != 0:
            raise InternalError("central block has non-factor structure")
        block_dims.append((size, rank // size))
    if sum(s * s for s, _ in block_dims) != alg.dim:
        raise InternalError("block dimensions do not add up to the span dimension")
    return CentralDecomposition(projections, block_dims)


def is_projection(x, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=np.complex128)
    return (max_abs(x @ x - x) <= 100 * tol.atol) and (max_abs(x - dagger(x)) <= 100 * tol.atol)


def random_element(alg: OperatorAlgebra, rng) -> np.ndarray:
    coeffs = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
    return element_from_coefficients(alg, coeffs)


def random_hermitian_element(alg: OperatorAlgebra, rng) -> np.ndarray:
    x = random_element(alg, rng)
    return 0.5 * (x + dagger(x))


def _partial_isometry(alg: OperatorAlgebra, p: np.ndarray, q: np.ndarray, rng,
                      tol: ToleranceConfig):
    """Partial isometry u in the algebra with u*u = p and uu* = q, or None.

    Built as the polar part of q X p for a generic algebra element X; valid
    whenever p and q are Murray-von Neumann equivalent in the algebra, which
    generic X certifies with probability one.
    """
    for _ in range(8):
        x = random_element(alg, rng)
        w = q @ x @ p
        s = dagger(w) @ w
        u = w @ psd_inverse_sqrt(s, tol)
        if max_abs(dagger(u) @ u - p) <= 1e-7 and max_abs(u @ dagger(u) - q) <= 1e-7:
            return u
    return None


def mvn_equivalent(alg: OperatorAlgebra, e, f, tol: ToleranceConfig = DEFAULT_TOL,
                   seed: int = DEFAULT_SEED, central: CentralDecomposition = None):
    """Murray-von Neumann equivalence of two projections in the algebra.

    Returns ``(equivalent, witness)``.  Equivalence holds iff the ambient
    ranks of zE and zF agree for every minimal central projection z; on
    success the witness is a partial isometry V in the algebra with
    V*V = E and VV* = F (the polar part of F X E for a seeded generic X).
    """
    e = np.asarray(e, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    for name, proj in (("E", e), ("F", f)):
        if not is_projection(proj, tol) or not contains(alg, proj, tol):
            raise NotInAlgebraError(f"{name} is not a projection in the algebra")
    if central is None:
        central = center_and_blocks(alg, tol)
    for z in central.minimal_central_projections:
        re = int(round((z @ e).trace().real))
        rf = int(round((z @ f).trace().real))
        if re != rf:
            return False, None
    if max_abs(e - f) <= tol.atol:
        return True, e.copy()
    rng = np.random.default_rng(seed)
    u = _partial_isometry(alg, e, f, rng, tol)
    if u is None:
        raise InternalError("failed to realize a Murray-von Neumann witness")
    return True, u


def cutdown(alg: OperatorAlgebra, e, tol: ToleranceConfig = DEFAULT_TOL):
    """Compression {E A E} on the range of a projection E in the algebra.

    Returns ``(sub_algebra, isometry)`` where the isometry R maps C^r into
    the ambient space (columns are an orthonormal basis of range E, taken
    from the deterministic eigendecomposition of E) and
    ``sub_algebra = { R* X R : X in EAE }`` is unital with unit I_r.
    """
    e = np.asarray(e, dtype=np.complex128)
    if not is_projection(e, tol) or not contains(alg, e, tol):
        raise NotInAlgebraError("cutdown requires a projection in the algebra")
    w, v = hermitian_eigendecomposition(e, tol)
    r = v[:, w > 0.5]
    compressed = [dagger(r) @ b @ r for b in alg.basis]
    sub = algebra_from_basis(compressed, r.shape[1], tol, validate=True)
    return sub, r


def hermitian_basis(alg: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the real vector space of self-adjoint elements.

    Cached on the algebra instance (instances are immutable by convention).
    """
    if alg._herm_basis is None:
        cands = []
        for b in alg.basis:
            cands.append(0.5 * (b + dagger(b)))
            cands.append((b - dagger(b)) / 2j)
        out = orthonormalize_matrices(cands, alg.ambient_dim, tol)
        if out.shape[0] != alg.dim:
            raise InternalError("hermitian basis dimension mismatch")
        alg._herm_basis = out
    return alg._herm_basis


def spans_equal(a: OperatorAlgebra, b: OperatorAlgebra,
                tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Mutual containment of spans at atol."""
    if a.ambient_dim != b.ambient_dim or a.dim != b.dim:
        return False
    return all(contains(b, x, tol) for x in a.basis) and all(
        contains(a, x, tol) for x in b.basis
    )
