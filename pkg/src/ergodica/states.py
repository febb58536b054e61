"""States on operator algebras: supports, GNS data, modular operators,
covariant implementations, and convex decompositions along commutant
projections.

A state is stored by an ambient density operator; evaluation is the trace
pairing f(A) = trace(rho A).  The canonical in-span density (the orthogonal
projection of rho onto the algebra, which coincides with the trace-preserving
conditional expectation and is therefore again PSD) is what supports,
faithfulness, and extremality arguments are read from.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    OperatorAlgebra,
    coefficients_of,
    contains,
    element_from_coefficients,
    project_to_span,
)
from .errors import (
    FamilyNotClosedError,
    NotFaithfulError,
    NotInvariantError,
    NotPSDError,
    TrivialProjectionError,
)
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    antilinear_polar_decomposition,
    dagger,
    hermitian_eigendecomposition,
    max_abs,
    support_projection_of_psd,
)

__all__ = [
    "StateFunctional",
    "state_from_density",
    "tracial_state",
    "vector_state",
    "support_of_state",
    "GnsData",
    "gns_construct",
    "ModularData",
    "modular_data",
    "covariant_unitaries",
    "decompose_by_commutant_projection",
    "DirectSumRep",
    "covariant_direct_sum",
    "state_partition_entropy",
    "state_from_functional_values",
]


@dataclass
class StateFunctional:
    """Positive normalized linear functional f(A) = trace(density A)."""

    algebra: OperatorAlgebra
    density: np.ndarray
    _canonical: np.ndarray = field(default=None, repr=False, compare=False)
    _support: np.ndarray = field(default=None, repr=False, compare=False)

    def value(self, x) -> complex:
        return complex(np.trace(self.density @ np.asarray(x, dtype=np.complex128)))

    def canonical_density(self) -> np.ndarray:
        """The unique PSD element of the span representing f on the algebra."""
        if self._canonical is None:
            c = project_to_span(self.algebra, self.density)
            self._canonical = 0.5 * (c + dagger(c))
        return self._canonical

    def support(self, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
        if self._support is None:
            self._support = support_projection_of_psd(self.canonical_density(), tol)
        return self._support

    def is_faithful(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        eye = np.eye(self.algebra.ambient_dim)
        return max_abs(self.support(tol) - eye) <= 100 * tol.atol


def state_from_density(alg: OperatorAlgebra, rho, tol: ToleranceConfig = DEFAULT_TOL,
                       normalize: bool = False) -> StateFunctional:
    """Validate a density operator and wrap it as a state on the algebra.

    The density lives on the ambient space and need not lie in the span.
    PSD is enforced at rank_tol slack (tiny negative eigenvalues from
    arithmetic are tolerated), the trace must be 1 (or `normalize=True`).
    """
    rho = np.asarray(rho, dtype=np.complex128)
    n = alg.ambient_dim
    if rho.shape != (n, n):
        raise NotPSDError(f"density has shape {rho.shape}, expected {(n, n)}")
    rho = 0.5 * (rho + dagger(rho))
    tr = float(rho.trace().real)
    if normalize:
        if abs(tr) < tol.rank_tol:
            raise NotPSDError("density trace is numerically zero")
        rho = rho / tr
    elif abs(tr - 1.0) > tol.rank_tol:
        raise NotPSDError(f"density trace {tr} is not 1")
    w, _ = hermitian_eigendecomposition(rho, tol)
    if w[0] < -tol.rank_tol:
        raise NotPSDError(f"density has negative eigenvalue {w[0]:.3e}")
    return StateFunctional(algebra=alg, density=rho)


def tracial_state(alg: OperatorAlgebra) -> StateFunctional:
    n = alg.ambient_dim
    return StateFunctional(algebra=alg, density=np.eye(n, dtype=np.complex128) / n)


def vector_state(alg: OperatorAlgebra, v) -> StateFunctional:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    v = v / np.linalg.norm(v)
    return StateFunctional(algebra=alg, density=np.outer(v, np.conj(v)))


def state_from_functional_values(alg: OperatorAlgebra, values,
                                 tol: ToleranceConfig = DEFAULT_TOL) -> StateFunctional:
    """Reconstruct a state from its values on the orthonormal basis.

    The representing density inside the span is (sum_a conj(values_a) B_a)*,
    hermitized; positivity of the functional makes it PSD.
    """
    coeffs = np.conj(np.asarray(values, dtype=np.complex128))
    rho = dagger(element_from_coefficients(alg, coeffs))
    return state_from_density(alg, 0.5 * (rho + dagger(rho)), tol)


def support_of_state(f: StateFunctional, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Smallest projection E in the algebra with f(E) = 1.

    This is the support of the canonical in-span density; its spectral
    projections lie in the algebra, and minimality follows because
    f(P) = 1 forces P to dominate the support.
    """
    return f.support(tol)


@dataclass
class GnsData:
    """Cyclic representation of the algebra built from a state.

    The Hilbert space is the span quotiented by the null space of the
    sesquilinear form (A, B) -> f(A* B); `embed` maps basis coefficients to
    coordinates, `lift` chooses representatives, and `pi_basis[a]` is the
    left-multiplication image of basis element a.
    """

    state: StateFunctional
    hilbert_dim: int
    embed: np.ndarray      # (h, k)
    lift: np.ndarray       # (k, h)
    pi_basis: np.ndarray   # (k, h, h)
    cyclic_vector: np.ndarray
    gram: np.ndarray

    @property
    def algebra(self) -> OperatorAlgebra:
        return self.state.algebra

    def rep(self, x) -> np.ndarray:
        """pi(X) for an element X of the span."""
        alg = self.algebra
        prods = np.asarray(x, dtype=np.complex128) @ alg.basis
        lmult = np.conj(alg.basis_vec) @ prods.reshape(alg.dim, -1).T
        return self.embed @ lmult @ self.lift

    def embed_vector(self, x) -> np.ndarray:
        """Coordinates of the class [X] in the GNS space."""
        return self.embed @ coefficients_of(self.algebra, x)


def gns_construct(f: StateFunctional, tol: ToleranceConfig = DEFAULT_TOL) -> GnsData:
    """Build the cyclic representation induced by the state.

    The Gram matrix G_ab = f(B_a* B_b) is assembled as W W* with rows
    vec(B_a sqrt(rho)); directions with Gram eigenvalue at or below
    rank_tol are quotiented away.
    """
    alg = f.algebra
    n = alg.ambient_dim
    k = alg.dim
    w, v = hermitian_eigendecomposition(f.density, tol)
    sqrt_rho = (v * np.sqrt(np.maximum(w, 0.0))) @ dagger(v)
    rows = (alg.basis @ sqrt_rho).reshape(k, n * n)
    gram = np.conj(rows) @ rows.T
    gram = 0.5 * (gram + dagger(gram))
    gw, gv = hermitian_eigendecomposition(gram, tol)
    keep = gw > tol.rank_tol
    h = int(np.count_nonzero(keep))
    sq = np.sqrt(gw[keep])
    embed = sq[:, None] * dagger(gv[:, keep])
    lift = gv[:, keep] * (1.0 / sq)
    prods = np.einsum("aij,bjk->abik", alg.basis, alg.basis)
    lmult = np.einsum("cv,abv->acb", np.conj(alg.basis_vec), prods.reshape(k, k, n * n))
    pi_basis = np.einsum("hc,acb,bg->ahg", embed, lmult, lift)
    xi = embed @ coefficients_of(alg, np.eye(n, dtype=np.complex128))
    return GnsData(
        state=f, hilbert_dim=h, embed=embed, lift=lift,
        pi_basis=pi_basis, cyclic_vector=xi, gram=gram,
    )


@dataclass
class ModularData:
    """Polar data of the conjugation [A] -> [A*] for a faithful state.

    `j_conj` is the matrix K of the antiunitary part x -> K conj(x);
    `delta` is the positive modular operator.
    """

    j_conj: np.ndarray
    delta: np.ndarray
    delta_half: np.ndarray

    def conjugate_operator(self, x) -> np.ndarray:
        """Image of an operator under conjugation by the antiunitary part."""
        j = self.j_conj
        return j @ np.conj(np.asarray(x, dtype=np.complex128)) @ np.conj(j)


def modular_data(g: GnsData, tol: ToleranceConfig = DEFAULT_TOL) -> ModularData:
    """Modular (J, Delta) of a faithful state's GNS representation.

    Requires the cyclic vector to be separating, i.e. the Gram null space is
    zero; callers with non-faithful states should cut down to the support
    first.
    """
    alg = g.algebra
    if g.hilbert_dim != alg.dim:
        raise NotFaithfulError(
            "state is not faithful on the algebra (GNS quotient is proper); "
            "cut down to the support first"
        )
    star = np.zeros((alg.dim, alg.dim), dtype=np.complex128)
    for i, b in enumerate(alg.basis):
        star[:, i] = coefficients_of(alg, dagger(b))
    k_s = g.embed @ star @ np.conj(g.lift)
    j, delta_half = antilinear_polar_decomposition(k_s, tol)
    delta = delta_half @ delta_half
    delta = 0.5 * (delta + dagger(delta))
    return ModularData(j_conj=j, delta=delta, delta_half=delta_half)


def _check_invariance(f: StateFunctional, action, tol: ToleranceConfig):
    basis = f.algebra.basis
    base_vals = np.einsum("ij,aji->a", f.density, basis)
    for h in action.group.generators:
        w = action.unitaries[h]
        moved = np.einsum("ij,ajk,lk->ail", w, basis, np.conj(w))
        vals = np.einsum("ij,aji->a", f.density, moved)
        if max_abs(vals - base_vals) > 100 * tol.atol:
            raise NotInvariantError("state is not invariant under the action")


def covariant_unitaries(g: GnsData, action, tol: ToleranceConfig = DEFAULT_TOL,
                        elements=None) -> dict:
    """Unitaries U_h on the GNS space with U_h [A] = [alpha_h(A)].

    The state must be invariant under the action (checked on generators).
    Each U_h implements the automorphism: U_h pi(A) U_h* = pi(alpha_h(A)).
    `elements` restricts the output to a subset (for large groups a
    generating set suffices for commutant arguments).
    """
    _check_invariance(g.state, action, tol)
    out = {}
    for h in (action.group.elements if elements is None else elements):
        alpha = action.coefficient_matrix(h)
        u = g.embed @ alpha @ g.lift
        out[h] = u
    return out


def decompose_by_commutant_projection(g: GnsData, unitaries: dict, e,
                                      tol: ToleranceConfig = DEFAULT_TOL):
    """Convex split of the state along a projection commuting with pi and U.

    Returns (lam, f_e, f_perp) with f = lam f_e + (1 - lam) f_perp on the
    algebra; both components are states of the original algebra given by
    in-span densities.
    """
    e = np.asarray(e, dtype=np.complex128)
    for a in range(g.pi_basis.shape[0]):
        if max_abs(e @ g.pi_basis[a] - g.pi_basis[a] @ e) > 100 * tol.atol:
            raise TrivialProjectionError("projection does not commute with the representation")
    for u in unitaries.values():
        if max_abs(e @ u - u @ e) > 100 * tol.atol:
            raise TrivialProjectionError("projection does not commute with the unitaries")
    xi = g.cyclic_vector
    lam = float(np.real(np.conj(xi) @ (e @ xi)))
    if not (tol.atol < lam < 1.0 - tol.atol):
        raise TrivialProjectionError(f"projection weight {lam} is trivial")
    k = g.algebra.dim
    vals_e = np.empty(k, dtype=np.complex128)
    vals_p = np.empty(k, dtype=np.complex128)
    eye = np.eye(g.hilbert_dim)
    for a in range(k):
        vals_e[a] = (np.conj(xi) @ (e @ g.pi_basis[a] @ xi)) / lam
        vals_p[a] = (np.conj(xi) @ ((eye - e) @ g.pi_basis[a] @ xi)) / (1.0 - lam)
    f_e = state_from_functional_values(g.algebra, vals_e, tol)
    f_p = state_from_functional_values(g.algebra, vals_p, tol)
    return lam, f_e, f_p


@dataclass
class DirectSumRep:
    """Block-diagonal GNS representation of a finite family of states,
    covariantly implemented: U_h permutes the summands along f -> f o alpha_h."""

    summands: list
    offsets: list
    total_dim: int
    unitaries: dict
    faithful: bool

    def rep(self, x) -> np.ndarray:
        out = np.zeros((self.total_dim, self.total_dim), dtype=np.complex128)
        for g, off in zip(self.summands, self.offsets):
            h = g.hilbert_dim
            out[off:off + h, off:off + h] = g.rep(x)
        return out


def covariant_direct_sum(states, action, tol: ToleranceConfig = DEFAULT_TOL) -> DirectSumRep:
    """Direct sum of the GNS representations of a family closed under the action.

    The family must be closed under f -> f o alpha_h (matched through the
    canonical in-span densities); U_h routes summand [f o alpha_h] into
    summand [f] through the per-summand coefficient maps.
    """
    states = list(states)
    canon = [s.canonical_density() for s in states]

    def find_index(mat):
        for j, c in enumerate(canon):
            if max_abs(mat - c) <= 1e-7:
                return j
        raise FamilyNotClosedError("family is not closed under composition with the action")

    sigma = {}
    for h in action.group.elements:
        w = action.unitaries[h]
        sigma[h] = []
        for s in states:
            moved = dagger(w) @ s.density @ w
            sigma[h].append(find_index(project_to_span(s.algebra, 0.5 * (moved + dagger(moved)))))

    gns_list = [gns_construct(s, tol) for s in states]
    offsets = []
    total = 0
    for g in gns_list:
        offsets.append(total)
        total += g.hilbert_dim
    unitaries = {}
    for h in action.group.elements:
        alpha = action.coefficient_matrix(h)
        u = np.zeros((total, total), dtype=np.complex128)
        for i, g in enumerate(gns_list):
            j = sigma[h][i]
            src = gns_list[j]
            block = g.embed @ alpha @ src.lift
            u[offsets[i]:offsets[i] + g.hilbert_dim,
              offsets[j]:offsets[j] + src.hilbert_dim] = block
        unitaries[h] = u
    faithful = any(s.is_faithful(tol) for s in states)
    return DirectSumRep(
        summands=gns_list, offsets=offsets, total_dim=total,
        unitaries=unitaries, faithful=faithful,
    )


def state_partition_entropy(f: StateFunctional, projections) -> float:
    """Entropy -sum f(P) ln f(P) of an orthogonal family of projections."""
    total = 0.0
    for p in projections:
        val = max(float(np.real(f.value(p))), 0.0)
        if val > 0.0:
            total -= val * np.log(val)
    return total
