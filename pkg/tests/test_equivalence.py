import numpy as np
import pytest

from ergodica.actions import action_from_unitaries, cyclic_shift_action, trivial_action
from ergodica.algebra import (
    block_algebra,
    center_and_blocks,
    diagonal_algebra,
    full_matrix_algebra,
    mvn_equivalent,
    random_element,
)
from ergodica.equivalence import (
    TwistWitness,
    central_orbit_structure,
    classify_t_type,
    invariant_trace,
    is_t_finite,
    randomized_witness_search,
    t_equivalent,
    verify_twist_witness,
)
from ergodica.groups import cyclic_group
from ergodica.numerics import dagger, max_abs

from .conftest import SWAP_BLOCKS_4


E11 = np.diag([1.0, 0, 0, 0]).astype(complex)
F11 = np.diag([0, 0, 1.0, 0]).astype(complex)


def test_invariant_trace_on_factor():
    m3 = full_matrix_algebra(3)
    tr = invariant_trace(m3, trivial_action(m3, cyclic_group(2)))
    assert tr.faithful
    assert abs(tr.value(np.eye(3)) - 1.0) <= 1e-12
    assert abs(tr.value(np.diag([1.0, 0, 0])) - 1 / 3) <= 1e-12


def test_invariant_trace_symmetric_under_swap(two_by_two_blocks, swap_action):
    tr = invariant_trace(two_by_two_blocks, swap_action)
    assert np.allclose(tr.weights, [0.25, 0.25])
    for g in swap_action.group.elements:
        x = np.diag([1.0, 0, 0, 0]).astype(complex)
        assert abs(tr.value(swap_action.apply(g, x)) - tr.value(x)) <= 1e-12


def test_invariant_trace_is_tracial_seeded():
    alg = block_algebra([(2, 1), (3, 1)])
    act = trivial_action(alg, cyclic_group(2))
    tr = invariant_trace(alg, act)
    rngs = np.random.default_rng(2)
    for _ in range(10):
        a = random_element(alg, rngs)
        b = random_element(alg, rngs)
        assert abs(tr.value(a @ b) - tr.value(b @ a)) <= 1e-12


def test_central_orbit_structure_of_swap(two_by_two_blocks, swap_action):
    central = center_and_blocks(two_by_two_blocks)
    sigma, orbits = central_orbit_structure(swap_action, central)
    assert orbits == [(0, 1)]
    assert sigma[(1,)] in ((1, 0),)


def test_t_equivalent_identity_pair(two_by_two_blocks, swap_action):
    w = t_equivalent(two_by_two_blocks, swap_action, E11, E11)
    assert w is not None
    assert w.support_elements() == [(0,)]
    assert verify_twist_witness(two_by_two_blocks, swap_action, E11, E11, w)


def test_t_equivalent_across_swap_blocks(two_by_two_blocks, swap_action):
    # MvN-inequivalent but twist-equivalent through the swap
    ok, _ = mvn_equivalent(two_by_two_blocks, E11, F11)
    assert not ok
    w = t_equivalent(two_by_two_blocks, swap_action, E11, F11)
    assert w is not None
    assert verify_twist_witness(two_by_two_blocks, swap_action, E11, F11, w)


def test_t_equivalent_rank_obstruction(two_by_two_blocks, swap_action):
    assert t_equivalent(two_by_two_blocks, swap_action, E11,
                        np.eye(4, dtype=complex)) is None


def test_verify_rejects_mutilated_witness(two_by_two_blocks, swap_action):
    w = t_equivalent(two_by_two_blocks, swap_action, E11, F11)
    broken = TwistWitness(members={g: np.zeros((4, 4), dtype=complex)
                                   for g in w.members})
    assert not verify_twist_witness(two_by_two_blocks, swap_action, E11, F11, broken)
    # a pair whose transport member is not self-adjoint: e11 in block 0 to
    # e22 in block 1; flipping adjoints swaps initial and final projections
    f22 = np.diag([0, 0, 0, 1.0]).astype(complex)
    w2 = t_equivalent(two_by_two_blocks, swap_action, E11, f22)
    assert w2 is not None
    assert any(max_abs(a - dagger(a)) > 1e-6 for a in w2.members.values())
    flipped = TwistWitness(members={g: dagger(a) for g, a in w2.members.items()})
    assert not verify_twist_witness(two_by_two_blocks, swap_action, E11, f22, flipped)


def test_mvn_implies_twist_equivalence():
    m3 = full_matrix_algebra(3)
    act = trivial_action(m3, cyclic_group(2))
    e = np.diag([1.0, 0, 0]).astype(complex)
    f = np.diag([0, 0, 1.0]).astype(complex)
    ok, v = mvn_equivalent(m3, e, f)
    assert ok
    w = TwistWitness(members={act.group.identity: v})
    assert verify_twist_witness(m3, act, e, f, w)
    assert t_equivalent(m3, act, e, f) is not None


def test_witnesses_preserve_invariant_trace(two_by_two_blocks, swap_action):
    tr = invariant_trace(two_by_two_blocks, swap_action)
    for e, f in ((E11, F11), (E11, E11),
                 (np.diag([1.0, 1, 0, 0]).astype(complex),
                  np.diag([0, 0, 1.0, 1]).astype(complex))):
        w = t_equivalent(two_by_two_blocks, swap_action, e, f)
        assert w is not None
        assert abs(tr.value(e) - tr.value(f)) <= 1e-10


def test_projection_valued_witnesses_on_diagonal_algebras():
    # conjecture-style diagnostic: for diagonal projections moved by a cyclic
    # shift, the constructed members come out as projections
    d4 = diagonal_algebra(4)
    act = cyclic_shift_action(d4)
    e = np.diag([1.0, 0, 0, 0]).astype(complex)
    f = np.diag([0, 0, 1.0, 0]).astype(complex)
    w = t_equivalent(d4, act, e, f)
    assert w is not None
    for a in w.members.values():
        assert max_abs(a @ a - a) <= 1e-9
        assert max_abs(a - dagger(a)) <= 1e-9


def test_is_t_finite_certificates(two_by_two_blocks, swap_action):
    res = is_t_finite(two_by_two_blocks, swap_action, np.eye(4, dtype=complex))
    assert res.t_finite
    assert res.trace.faithful
    assert res.profiles_scanned > 0
    rank1 = is_t_finite(two_by_two_blocks, swap_action, E11)
    assert rank1.t_finite
    zero = is_t_finite(two_by_two_blocks, swap_action, np.zeros((4, 4), dtype=complex))
    assert zero.t_finite


def test_classify_t_type_labels(two_by_two_blocks, swap_action):
    cls = classify_t_type(two_by_two_blocks, swap_action)
    assert cls.label == "T-finite"
    assert cls.type_label == "T-Type II(1)"
    assert cls.certificate.t_finite
    d4 = diagonal_algebra(4)
    assert classify_t_type(d4, cyclic_shift_action(d4)).label == "T-finite"


def test_randomized_search_agrees_on_swap_example(two_by_two_blocks, swap_action):
    w = randomized_witness_search(two_by_two_blocks, swap_action, E11, F11, trials=200)
    assert w is not None
    assert verify_twist_witness(two_by_two_blocks, swap_action, E11, F11, w)
    none = randomized_witness_search(two_by_two_blocks, swap_action, E11,
                                     np.eye(4, dtype=complex), trials=200)
    assert none is None
