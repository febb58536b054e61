"""Group actions by *-automorphisms and the ergodicity machinery built on them.

Automorphisms are represented by ambient unitary conjugations: alpha_g(X) =
W_g X W_g*.  The homomorphism property is a property of the conjugations, not
of the unitaries (which may compose projectively), and is validated as such.
Group averages always reduce in lexicographic element order.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    OperatorAlgebra,
    algebra_from_basis,
    coefficients_of,
    cutdown,
    element_from_coefficients,
    hermitian_basis,
    nullspace_from_gram,
    random_element,
)
from .config import DEFAULT_SEED
from .errors import (
    DimensionMismatchError,
    InternalError,
    NotInvariantError,
    SupportNotInvariantError,
)
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    commutation_gram,
    dagger,
    frobenius,
    hermitian_eigendecomposition,
    kron,
    max_abs,
)
from .states import (
    StateFunctional,
    covariant_unitaries,
    decompose_by_commutant_projection,
    gns_construct,
    state_from_density,
    support_of_state,
)

__all__ = [
    "AutomorphicAction",
    "SingleAutomorphism",
    "action_from_unitaries",
    "permutation_matrix",
    "cyclic_shift_action",
    "permutation_action",
    "trivial_action",
    "average_state",
    "mean_ergodic_projection",
    "invariant_state_for_automorphism",
    "fixed_point_algebra",
    "is_ergodic_action",
    "ErgodicStateResult",
    "is_ergodic_state",
    "WanderingCertificate",
    "wandering_projection_search",
    "orbit_norm_deviation",
]


@dataclass
class AutomorphicAction:
    """A finite group represented by *-automorphisms of one algebra."""

    group: object
    algebra: OperatorAlgebra
    unitaries: dict
    _coeff_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def apply(self, g, x) -> np.ndarray:
        w = self.unitaries[g]
        return w @ np.asarray(x, dtype=np.complex128) @ dagger(w)

    def coefficient_matrix(self, g) -> np.ndarray:
        """Matrix of alpha_g on span coefficients (cached per element)."""
        if g not in self._coeff_cache:
            alg = self.algebra
            moved = np.stack([self.apply(g, b) for b in alg.basis])
            self._coeff_cache[g] = np.conj(alg.basis_vec) @ moved.reshape(alg.dim, -1).T
        return self._coeff_cache[g]


@dataclass
class SingleAutomorphism:
    """Generator of a Z-action: one automorphism given by a unitary."""

    algebra: OperatorAlgebra
    unitary: np.ndarray

    def apply(self, x) -> np.ndarray:
        return self.unitary @ np.asarray(x, dtype=np.complex128) @ dagger(self.unitary)


def _check_automorphism_unitary(alg: OperatorAlgebra, w, tol: ToleranceConfig):
    w = np.asarray(w, dtype=np.complex128)
    n = alg.ambient_dim
    if w.shape != (n, n):
        raise DimensionMismatchError(f"unitary has shape {w.shape}, expected {(n, n)}")
    if max_abs(dagger(w) @ w - np.eye(n)) > 100 * tol.atol:
        raise NotInvariantError("conjugating matrix is not unitary")
    return w


def action_from_unitaries(group, alg: OperatorAlgebra, unitaries: dict,
                          tol: ToleranceConfig = DEFAULT_TOL,
                          check: str = "auto") -> AutomorphicAction:
    """Validate and build an action from per-element conjugating unitaries.

    Checks per element: unitarity and span preservation.  The homomorphism
    property alpha_g o alpha_h = alpha_{gh} is checked on basis elements, on
    all element pairs when the group is small (or check='full'), otherwise
    on generator pairs (check='light'); fixed automatically by group order
    when check='auto'.
    """
    unitaries = {g: _check_automorphism_unitary(alg, unitaries[g], tol)
                 for g in group.elements}
    action = AutomorphicAction(group=group, algebra=alg, unitaries=unitaries)
    if check == "auto":
        check = "full" if group.order <= 16 else "light"
    probe = group.elements if check == "full" else list(group.generators)
    for g in probe:
        for b in alg.basis:
            moved = action.apply(g, b)
            res = max_abs(moved - element_from_coefficients(alg, coefficients_of(alg, moved)))
            if res > 100 * tol.atol:
                raise NotInvariantError("automorphism does not preserve the span")
    pairs = ([(g, h) for g in group.elements for h in group.elements]
             if check == "full"
             else [(g, h) for g in group.generators for h in group.generators])
    for g, h in pairs:
        gh = group.compose(g, h)
        for b in alg.basis[: min(alg.dim, 4)]:
            lhs = action.apply(g, action.apply(h, b))
            rhs = action.apply(gh, b)
            if max_abs(lhs - rhs) > 100 * tol.atol:
                raise NotInvariantError("unitaries do not implement a group homomorphism")
    return action


def permutation_matrix(perm) -> np.ndarray:
    """Unitary sending basis vector i to basis vector perm[i]."""
    n = len(perm)
    p = np.zeros((n, n), dtype=np.complex128)
    for i, j in enumerate(perm):
        p[j, i] = 1.0
    return p


def cyclic_shift_action(alg: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL):
    """Z_n cyclic-shift action on an algebra over C^n (sites i -> i+1)."""
    from .groups import cyclic_group

    n = alg.ambient_dim
    group = cyclic_group(n)
    shift = permutation_matrix([(i + 1) % n for i in range(n)])
    unitaries = {(j,): np.linalg.matrix_power(shift, j) for j in range(n)}
    return action_from_unitaries(group, alg, unitaries, tol)


def permutation_action(alg: OperatorAlgebra, group,
                       tol: ToleranceConfig = DEFAULT_TOL,
                       check: str = "auto") -> AutomorphicAction:
    """Action of a permutation group by permutation unitaries."""
    unitaries = {p: permutation_matrix(p) for p in group.elements}
    return action_from_unitaries(group, alg, unitaries, tol, check=check)


def trivial_action(alg: OperatorAlgebra, group=None) -> AutomorphicAction:
    from .groups import cyclic_group

    if group is None:
        group = cyclic_group(1)
    eye = np.eye(alg.ambient_dim, dtype=np.complex128)
    return AutomorphicAction(group=group, algebra=alg,
                             unitaries={g: eye for g in group.elements})


def average_state(f: StateFunctional, action: AutomorphicAction,
                  tol: ToleranceConfig = DEFAULT_TOL) -> StateFunctional:
    """Group mean h = |T|^-1 sum_g f o alpha_g; invariant, faithful if f is.

    The mean of the transported densities W_g* rho W_g is taken in
    lexicographic element order; the convexity bound
    min_eig(h) >= min_eig(f)/|T| follows because each term is a unitary
    conjugate of rho.
    """
    rho = f.density
    acc = np.zeros_like(rho)
    for g in action.group.elements:
        w = action.unitaries[g]
        acc = acc + dagger(w) @ rho @ w
    acc = acc / action.group.order
    return state_from_density(f.algebra, 0.5 * (acc + dagger(acc)), tol)


def mean_ergodic_projection(theta: SingleAutomorphism,
                            tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection (on the ambient matrix space) onto the fixed
    points of X -> W X W*, computed exactly from the eigenvalue-1 space of
    the unitary superoperator rather than by numerical Cesaro limits."""
    w = theta.unitary
    n = w.shape[0]
    superop = kron(w, np.conj(w))
    c = superop - np.eye(n * n)
    null = nullspace_from_gram(dagger(c) @ c, tol)
    return null @ dagger(null)


def invariant_state_for_automorphism(f: StateFunctional, theta: SingleAutomorphism,
                                     tol: ToleranceConfig = DEFAULT_TOL) -> StateFunctional:
    """Invariant state h = f o P for the mean-ergodic projection P of theta.

    h is theta-invariant at the projection level (P Theta = P exactly up to
    arithmetic), normalized, positive, and faithful whenever f is: P is a
    limit of averages of unitary conjugates, so min_eig(P rho) >= min_eig(rho).
    """
    p = mean_ergodic_projection(theta, tol)
    n = theta.algebra.ambient_dim
    rho = (p @ f.density.reshape(n * n)).reshape(n, n)
    rho = 0.5 * (rho + dagger(rho))
    return state_from_density(f.algebra, rho, tol)


def fixed_point_algebra(action: AutomorphicAction,
                        tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """Elements of the algebra fixed by every alpha_g, as an algebra.

    Computed from the joint null space of (alpha_g - id) on span
    coefficients over the group generators (fixed under generators implies
    fixed under the group)."""
    alg = action.algebra
    k = alg.dim
    gram = np.zeros((k, k), dtype=np.complex128)
    eye = np.eye(k)
    for g in action.group.generators:
        c = action.coefficient_matrix(g) - eye
        gram += dagger(c) @ c
    null = nullspace_from_gram(gram, tol)
    mats = [element_from_coefficients(alg, null[:, j]) for j in range(null.shape[1])]
    return algebra_from_basis(mats, alg.ambient_dim, tol, validate=True)


def _nontrivial_fixed_projection(fixed: OperatorAlgebra, tol: ToleranceConfig):
    """Spectral projection of the first non-scalar self-adjoint fixed element."""
    n = fixed.ambient_dim
    eye = np.eye(n)
    for h in hermitian_basis(fixed, tol):
        traceless = h - (h.trace() / n) * eye
        if max_abs(traceless) <= tol.rank_tol:
            continue
        w, v = hermitian_eigendecomposition(h, tol)
        mid = 0.5 * (w[0] + w[-1])
        vk = v[:, w > mid]
        proj = vk @ dagger(vk)
        rank = int(round(proj.trace().real))
        if 0 < rank < n:
            return proj
    raise InternalError("failed to extract a nontrivial fixed projection")


def is_ergodic_action(action: AutomorphicAction, tol: ToleranceConfig = DEFAULT_TOL):
    """Whether only scalars are fixed; on failure also return a witness:
    a nontrivial fixed projection in the algebra."""
    fixed = fixed_point_algebra(action, tol)
    if fixed.dim == 1:
        return True, None
    return False, _nontrivial_fixed_projection(fixed, tol)


@dataclass
class ErgodicStateResult:
    is_ergodic: bool
    joint_commutant_dim: int
    support: np.ndarray
    witness_projection: np.ndarray = None
    split: tuple = None  # (lam, f1, f2) on the original algebra


def _cut_action(action: AutomorphicAction, sub: OperatorAlgebra, isometry,
                tol: ToleranceConfig) -> AutomorphicAction:
    unitaries = {}
    for g in action.group.elements:
        unitaries[g] = dagger(isometry) @ action.unitaries[g] @ isometry
    return AutomorphicAction(group=action.group, algebra=sub, unitaries=unitaries)


def _joint_commutant_dim(gns, unitaries_gens, tol: ToleranceConfig):
    """Null-space basis of the joint commutation constraints on the GNS space."""
    h = gns.hilbert_dim
    ops = list(gns.pi_basis) + list(unitaries_gens)
    null = nullspace_from_gram(commutation_gram(ops, h), tol)
    mats = [null[:, j].reshape(h, h) for j in range(null.shape[1])]
    return algebra_from_basis(mats, h, tol, validate=False)


def is_ergodic_state(f: StateFunctional, action: AutomorphicAction,
                     tol: ToleranceConfig = DEFAULT_TOL) -> ErgodicStateResult:
    """Extremality of an invariant state among the invariant states.

    Cuts the algebra and the action down to the support of f, builds the
    GNS representation of the (now faithful) restriction together with its
    covariant unitaries, and tests whether the joint commutant
    pi(A)' n {U_g}' is trivial.  On failure the result carries a nontrivial
    joint-commutant projection and the convex split it induces, lifted back
    to states of the original algebra.
    """
    alg = f.algebra
    base_vals = np.einsum("ij,aji->a", f.density, alg.basis)
    for g in action.group.generators:
        w = action.unitaries[g]
        moved = np.einsum("ij,ajk,lk->ail", w, alg.basis, np.conj(w))
        vals = np.einsum("ij,aji->a", f.density, moved)
        if max_abs(vals - base_vals) > 100 * tol.atol:
            raise NotInvariantError("state is not invariant under the action")
    support = support_of_state(f, tol)
    for g in action.group.generators:
        if max_abs(action.apply(g, support) - support) > 100 * tol.atol:
            raise SupportNotInvariantError(
                "support of an invariant state moved under the action"
            )
    n = alg.ambient_dim
    if max_abs(support - np.eye(n)) <= 100 * tol.atol:
        sub, isometry = alg, np.eye(n, dtype=np.complex128)
        f_cut = f
        cut_act = action
    else:
        sub, isometry = cutdown(alg, support, tol)
        rho_c = dagger(isometry) @ f.density @ isometry
        f_cut = state_from_density(sub, rho_c, tol, normalize=True)
        cut_act = _cut_action(action, sub, isometry, tol)
    gns = gns_construct(f_cut, tol)
    unitaries = covariant_unitaries(gns, cut_act, tol,
                                    elements=list(action.group.generators))
    gens = [unitaries[g] for g in action.group.generators]
    joint = _joint_commutant_dim(gns, gens, tol)
    if joint.dim == 1:
        return ErgodicStateResult(True, 1, support)
    witness = _nontrivial_fixed_projection(joint, tol)
    lam, f1_cut, f2_cut = decompose_by_commutant_projection(gns, unitaries, witness, tol)
    f1 = state_from_density(alg, isometry @ f1_cut.density @ dagger(isometry), tol)
    f2 = state_from_density(alg, isometry @ f2_cut.density @ dagger(isometry), tol)
    return ErgodicStateResult(False, joint.dim, support, witness, (lam, f1, f2))


@dataclass
class WanderingCertificate:
    projection: np.ndarray
    elements: list
    images: list


def wandering_projection_search(action: AutomorphicAction, max_orbit: int,
                                candidates=None, num_random: int = 64,
                                seed: int = DEFAULT_SEED,
                                tol: ToleranceConfig = DEFAULT_TOL):
    """Search for a projection with pairwise-orthogonal images under the action.

    Candidates default to block-minimal projections harvested from seeded
    self-adjoint elements of the algebra plus `num_random` seeded low-rank
    spectral projections.  For each candidate a greedy pass over the group
    (lexicographic order) collects elements whose images stay orthogonal; a
    family of k = min(max_orbit, |T|) images is returned as a certificate.

    For a finite group acting on a finite-dimensional algebra the
    weak-convergence form of wandering never occurs: automorphism orbits
    preserve the Frobenius norm, so no nonzero projection can have images
    tending to zero.  This search is a diagnostic for orthogonal-orbit
    structure only; k < 2 returns None outright.
    """
    group = action.group
    k = min(int(max_orbit), group.order)
    if k < 2:
        return None
    alg = action.algebra
    n = alg.ambient_dim
    if candidates is None:
        rng = np.random.default_rng(seed)
        candidates = []
        for _ in range(max(1, num_random)):
            y = random_element(alg, rng)
            z = y @ dagger(y)
            w, v = hermitian_eigendecomposition(z, tol)
            top = w >= w[-1] - tol.rank_tol * max(1.0, w[-1])
            vk = v[:, top]
            candidates.append(vk @ dagger(vk))
    for p in candidates:
        p = np.asarray(p, dtype=np.complex128)
        rank = int(round(p.trace().real))
        if rank == 0 or rank == n:
            continue
        family = []
        chosen = []
        for g in group.elements:
            q = action.apply(g, p)
            if all(max_abs(prev @ q) <= 1e-7 for prev in family):
                family.append(q)
                chosen.append(g)
                if len(family) == k:
                    return WanderingCertificate(projection=p, elements=chosen, images=family)
    return None


def orbit_norm_deviation(action: AutomorphicAction, num_samples: int = 8,
                         seed: int = DEFAULT_SEED) -> float:
    """Max deviation of ||alpha_g(X)||_F from ||X||_F over seeded elements.

    Always at roundoff level: unitary conjugation preserves the Frobenius
    norm, which is why weak-null wandering cannot occur here."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(num_samples):
        x = random_element(action.algebra, rng)
        base = frobenius(x)
        for g in action.group.elements:
            worst = max(worst, abs(frobenius(action.apply(g, x)) - base))
    return worst
