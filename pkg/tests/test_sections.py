import numpy as np
import pytest

from ergodica.actions import is_ergodic_action
from ergodica.algebra import center_and_blocks, mvn_equivalent
from ergodica.equivalence import t_equivalent, verify_twist_witness
from ergodica.errors import DimensionOverflowError, TwistIncompatibleError
from ergodica.numerics import max_abs
from ergodica.sections import (
    FibreSpec,
    LatticePatch,
    build_sections_algebra,
    translation_action,
)

from .conftest import PAULI_Z


def test_build_m2_pair():
    sa = build_sections_algebra(LatticePatch((2,)), FibreSpec(2))
    assert sa.ambient_dim == 4
    assert sa.algebra.dim == 8
    cd = center_and_blocks(sa.algebra)
    assert cd.block_dims == [(2, 1), (2, 1)]
    total = sum(sa.site_projections.values())
    assert max_abs(total - np.eye(4)) <= 1e-12


def test_build_diagonal_cases():
    sa = build_sections_algebra(LatticePatch((3,)), FibreSpec(1))
    assert sa.ambient_dim == 3 and sa.algebra.dim == 3
    sa22 = build_sections_algebra(LatticePatch((2, 2)), FibreSpec(1))
    assert sa22.ambient_dim == 4 and sa22.algebra.dim == 4


def test_dimension_cap():
    with pytest.raises(DimensionOverflowError):
        build_sections_algebra(LatticePatch((10,)), FibreSpec(10), dim_cap=96)


def test_translation_is_plain_swap_without_twist():
    sa = build_sections_algebra(LatticePatch((2,)), FibreSpec(2))
    act = translation_action(sa)
    w = act.unitaries[(1,)]
    expected = np.zeros((4, 4), dtype=complex)
    expected[2, 0] = expected[3, 1] = expected[0, 2] = expected[1, 3] = 1.0
    assert max_abs(w - expected) <= 1e-12


def test_translation_permutes_site_projections():
    sa = build_sections_algebra(LatticePatch((3,)), FibreSpec(2), dim_cap=96)
    act = translation_action(sa)
    for t in act.group.elements:
        for site, p in sa.site_projections.items():
            moved = act.apply(t, p)
            target = sa.site_projections[sa.patch.translate(site, t)]
            assert max_abs(moved - target) <= 1e-12


def test_twisted_swap_is_an_involution():
    twist = {(0,): np.eye(2, dtype=complex), (1,): PAULI_Z}
    sa = build_sections_algebra(LatticePatch((2,)), FibreSpec(2, twist=twist))
    act = translation_action(sa)
    w = act.unitaries[(1,)]
    assert max_abs(w @ w - np.eye(4)) <= 1e-12
    for b in sa.algebra.basis:
        assert max_abs(act.apply((1,), act.apply((1,), b)) - b) <= 1e-10


def test_incompatible_twist_rejected():
    bad = np.diag([1.0, np.exp(1j * np.pi / 3)]).astype(complex)
    sa = build_sections_algebra(LatticePatch((2,)),
                                FibreSpec(2, twist={(1,): bad}))
    with pytest.raises(TwistIncompatibleError):
        translation_action(sa)


def test_non_unitary_twist_rejected():
    with pytest.raises(TwistIncompatibleError):
        build_sections_algebra(LatticePatch((2,)),
                               FibreSpec(2, twist={(0,): 2 * np.eye(2, dtype=complex)}))


def test_ergodicity_of_translations():
    # matrix fibres leave the constant sections fixed: never ergodic for n > 1
    sa = build_sections_algebra(LatticePatch((2,)), FibreSpec(2))
    assert not is_ergodic_action(translation_action(sa))[0]
    sa3 = build_sections_algebra(LatticePatch((3,)), FibreSpec(2), dim_cap=96)
    assert not is_ergodic_action(translation_action(sa3))[0]
    # a full single cycle of scalar fibres is ergodic
    line = build_sections_algebra(LatticePatch((4,)), FibreSpec(1))
    assert is_ergodic_action(translation_action(line))[0]


def test_cross_site_equivalence_pipeline():
    # equal-rank projections at distinct sites: twist-equivalent via the
    # translation group, never Murray-von Neumann equivalent
    sa = build_sections_algebra(LatticePatch((2,)), FibreSpec(2))
    act = translation_action(sa)
    alg = sa.algebra
    e = np.zeros((4, 4), dtype=complex)
    f = np.zeros((4, 4), dtype=complex)
    e[0, 0] = 1.0
    f[2, 2] = 1.0
    ok, _ = mvn_equivalent(alg, e, f)
    assert not ok
    w = t_equivalent(alg, act, e, f)
    assert w is not None
    assert verify_twist_witness(alg, act, e, f, w)
