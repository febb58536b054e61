import numpy as np
import pytest

from ergodica.actions import (
    SingleAutomorphism,
    action_from_unitaries,
    average_state,
    cyclic_shift_action,
    fixed_point_algebra,
    invariant_state_for_automorphism,
    is_ergodic_action,
    is_ergodic_state,
    mean_ergodic_projection,
    orbit_norm_deviation,
    permutation_action,
    permutation_matrix,
    trivial_action,
    wandering_projection_search,
)
from ergodica.algebra import contains, diagonal_algebra, full_matrix_algebra, is_projection
from ergodica.errors import NotInvariantError
from ergodica.groups import PermutationGroup, cyclic_group
from ergodica.numerics import hermitian_eigendecomposition, max_abs
from ergodica.states import state_from_density, tracial_state

from .conftest import PAULI_X, SWAP_TENSOR_4, random_density


def test_action_validation_rejects_non_homomorphism():
    d2 = diagonal_algebra(2)
    bad = {(0,): np.eye(2, dtype=complex),
           (1,): np.diag([1.0, np.exp(0.4j)]).astype(complex)}
    # unitary and span-preserving, but (1,)+(1,)=(0,) fails as an automorphism
    # relation only if conjugation differs from identity; diagonal phases act
    # trivially on the diagonal algebra, so this is actually fine
    act = action_from_unitaries(cyclic_group(2), d2, bad)
    assert act is not None
    m2 = full_matrix_algebra(2)
    with pytest.raises(NotInvariantError):
        action_from_unitaries(cyclic_group(2), m2,
                              {(0,): np.eye(2, dtype=complex),
                               (1,): np.diag([1.0, np.exp(0.4j)]).astype(complex)})


def test_average_fixed_point_is_identity_map(two_by_two_blocks, swap_action):
    f = tracial_state(two_by_two_blocks)
    h = average_state(f, swap_action)
    assert max_abs(h.density - f.density) <= 1e-12


def test_average_vector_state_under_shift_is_uniform():
    d3 = diagonal_algebra(3)
    act = cyclic_shift_action(d3)
    f = state_from_density(d3, np.diag([1.0, 0, 0]))
    h = average_state(f, act)
    assert np.allclose(h.density.diagonal().real, [1 / 3] * 3, atol=1e-12)


def test_average_preserves_faithfulness_with_bound():
    rngs = np.random.default_rng(7)
    for trial in range(10):
        d4 = diagonal_algebra(4)
        act = cyclic_shift_action(d4)
        rho = random_density(rngs, 4, floor=0.05)
        f = state_from_density(d4, rho)
        h = average_state(f, act)
        wf, _ = hermitian_eigendecomposition(rho)
        wh, _ = hermitian_eigendecomposition(h.density)
        assert wh[0] >= wf[0] / act.group.order - 1e-12
        for g in act.group.elements:
            for b in d4.basis:
                assert abs(h.value(act.apply(g, b)) - h.value(b)) <= 1e-12


def test_mean_ergodic_identity_automorphism(m2):
    theta = SingleAutomorphism(m2, np.eye(2, dtype=complex))
    f = state_from_density(m2, np.diag([0.7, 0.3]))
    h = invariant_state_for_automorphism(f, theta)
    assert max_abs(h.density - f.density) <= 1e-12


def test_mean_ergodic_shift_gives_uniform():
    # oracle: the Cesaro average over one full period
    for n in (3, 5):
        dn = diagonal_algebra(n)
        shift = permutation_matrix([(i + 1) % n for i in range(n)])
        theta = SingleAutomorphism(dn, shift)
        rngs = np.random.default_rng(n)
        rho = np.diag(rngs.random(n) + 0.1).astype(complex)
        rho /= rho.trace().real
        f = state_from_density(dn, rho)
        h = invariant_state_for_automorphism(f, theta)
        cesaro = sum(np.linalg.matrix_power(shift, j) @ rho
                     @ np.linalg.matrix_power(shift, j).conj().T
                     for j in range(n)) / n
        assert max_abs(h.density - cesaro) <= 1e-10


def test_mean_ergodic_irrational_phase_dephases():
    # oracle: Cesaro averages at N = 10^4 agree to 1e-3
    m2 = full_matrix_algebra(2)
    phi = 1.0  # phi / pi irrational
    u = np.diag([1.0, np.exp(1j * phi)]).astype(complex)
    theta = SingleAutomorphism(m2, u)
    rngs = np.random.default_rng(12)
    rho = random_density(rngs, 2, floor=0.1)
    f = state_from_density(m2, rho)
    h = invariant_state_for_automorphism(f, theta)
    assert max_abs(h.density - np.diag(rho.diagonal())) <= 1e-10
    big_n = 10_000
    acc = np.zeros((2, 2), dtype=complex)
    cur = rho.copy()
    for _ in range(big_n):
        acc += cur
        cur = u @ cur @ u.conj().T
    assert max_abs(acc / big_n - h.density) <= 1e-3
    p = mean_ergodic_projection(theta)
    superop = np.kron(u, np.conj(u))
    assert max_abs(p @ superop - p) <= 1e-10


def test_fixed_point_algebra_trivial_action(m2):
    fixed = fixed_point_algebra(trivial_action(m2))
    assert fixed.dim == m2.dim


def test_fixed_point_algebra_of_tensor_swap():
    m4 = full_matrix_algebra(4)
    act = action_from_unitaries(cyclic_group(2), m4,
                                {(0,): np.eye(4, dtype=complex), (1,): SWAP_TENSOR_4})
    fixed = fixed_point_algebra(act)
    # oracle: null space of (Ad SWAP - id) on the 16-dim matrix space
    superop = np.kron(SWAP_TENSOR_4, np.conj(SWAP_TENSOR_4)) - np.eye(16)
    oracle_dim = 16 - np.linalg.matrix_rank(superop)
    assert fixed.dim == oracle_dim == 10


def test_fixed_point_algebra_shift_is_scalars():
    d4 = diagonal_algebra(4)
    assert fixed_point_algebra(cyclic_shift_action(d4)).dim == 1


def test_is_ergodic_action_cases():
    for n in (3, 4, 5):
        assert is_ergodic_action(cyclic_shift_action(diagonal_algebra(n)))[0]
    # shift by 2 on C4 generates an order-2 subgroup with two orbits
    d4 = diagonal_algebra(4)
    shift2 = permutation_matrix([2, 3, 0, 1])
    act = action_from_unitaries(cyclic_group(2), d4,
                                {(0,): np.eye(4, dtype=complex), (1,): shift2})
    ok, witness = is_ergodic_action(act)
    assert not ok
    assert is_projection(witness)
    assert contains(d4, witness)
    assert max_abs(act.apply((1,), witness) - witness) <= 1e-9
    rank = int(round(witness.trace().real))
    assert rank == 2
    m2 = full_matrix_algebra(2)
    ok, witness = is_ergodic_action(trivial_action(m2))
    assert not ok and is_projection(witness)


def test_is_ergodic_state_shift_uniform():
    for n in (3, 4, 5, 6):
        dn = diagonal_algebra(n)
        res = is_ergodic_state(tracial_state(dn), cyclic_shift_action(dn))
        assert res.is_ergodic


def test_is_ergodic_state_two_cycles_splits():
    d4 = diagonal_algebra(4)
    perm = (1, 0, 3, 2)
    group = PermutationGroup(4, ((0, 1, 2, 3), perm), generator_tuple=(perm,))
    act = permutation_action(d4, group)
    res = is_ergodic_state(tracial_state(d4), act)
    assert not res.is_ergodic
    lam, f1, f2 = res.split
    assert abs(lam - 0.5) <= 1e-9
    recon = lam * f1.density + (1 - lam) * f2.density
    for b in d4.basis:
        assert abs(np.trace(recon @ b) - 0.25 * np.trace(b)) <= 1e-9
    for fi in (f1, f2):
        for b in d4.basis:
            assert abs(fi.value(act.apply(perm, b)) - fi.value(b)) <= 1e-9


def test_is_ergodic_state_tracial_on_factor_not_extreme(m2):
    res = is_ergodic_state(tracial_state(m2), trivial_action(m2))
    assert not res.is_ergodic
    assert res.joint_commutant_dim == 4


def test_is_ergodic_state_partial_support():
    # support cut: a state on a strict sub-orbit of the action
    d4 = diagonal_algebra(4)
    perm = (1, 0, 3, 2)
    group = PermutationGroup(4, ((0, 1, 2, 3), perm), generator_tuple=(perm,))
    act = permutation_action(d4, group)
    f = state_from_density(d4, np.diag([0.5, 0.5, 0, 0]))
    res = is_ergodic_state(f, act)
    assert res.is_ergodic
    assert max_abs(res.support - np.diag([1.0, 1.0, 0, 0])) <= 1e-10


def test_is_ergodic_state_rejects_non_invariant():
    d3 = diagonal_algebra(3)
    act = cyclic_shift_action(d3)
    f = state_from_density(d3, np.diag([0.6, 0.3, 0.1]))
    with pytest.raises(NotInvariantError):
        is_ergodic_state(f, act)


def test_wandering_search_trivial_action_returns_none(m2):
    assert wandering_projection_search(trivial_action(m2), max_orbit=4) is None


def test_wandering_search_shift_orbit_of_rank_one():
    d4 = diagonal_algebra(4)
    act = cyclic_shift_action(d4)
    e = np.diag([1.0, 0, 0, 0]).astype(complex)
    cert = wandering_projection_search(act, max_orbit=4, candidates=[e])
    assert cert is not None
    assert len(cert.elements) == 4
    for a, b in zip(cert.images, cert.images[1:]):
        assert max_abs(a @ b) <= 1e-9


def test_wandering_search_fixed_candidate_returns_none(two_by_two_blocks, swap_action):
    eye = np.eye(4, dtype=complex)
    assert wandering_projection_search(swap_action, max_orbit=2, candidates=[eye]) is None
    half = np.diag([1.0, 1.0, 0, 0]).astype(complex)
    cert = wandering_projection_search(swap_action, max_orbit=2, candidates=[half])
    assert cert is not None and len(cert.elements) == 2


def test_orbit_norms_are_preserved(swap_action):
    assert orbit_norm_deviation(swap_action) <= 1e-10
