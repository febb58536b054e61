import numpy as np
import pytest

from ergodica.algebra import (
    block_algebra,
    center_and_blocks,
    commutant,
    contains,
    cutdown,
    diagonal_algebra,
    full_matrix_algebra,
    generate_algebra,
    hermitian_basis,
    is_projection,
    mvn_equivalent,
    random_element,
    spans_equal,
)
from ergodica.errors import DimensionMismatchError, NotInAlgebraError
from ergodica.numerics import dagger, max_abs, trace_inner

from .conftest import PAULI_X, PAULI_Z, SWAP_TENSOR_4


def test_generate_from_nothing_is_scalars():
    alg = generate_algebra([], 3)
    assert alg.dim == 1
    assert contains(alg, np.eye(3, dtype=complex))


def test_generate_diagonal_units():
    gens = [np.diag([1.0 if i == j else 0.0 for i in range(4)]).astype(complex)
            for j in range(4)]
    alg = generate_algebra(gens, 4)
    assert alg.dim == 4


def test_generate_paulis_give_full_m2():
    alg = generate_algebra([PAULI_X, PAULI_Z], 2)
    assert alg.dim == 4
    # oracle: words of length <= 2 already span M_2; Gram matrix has full rank
    words = [np.eye(2, dtype=complex), PAULI_X, PAULI_Z, PAULI_X @ PAULI_Z]
    gram = np.array([[trace_inner(a, b) for b in words] for a in words])
    assert np.linalg.matrix_rank(gram) == 4


def test_generate_rejects_wrong_shape():
    with pytest.raises(DimensionMismatchError):
        generate_algebra([np.eye(3)], 2)


def test_commutant_of_factor_is_scalars(m2):
    assert commutant(m2).dim == 1


def test_commutant_of_diagonal_is_itself():
    d3 = diagonal_algebra(3)
    c = commutant(d3)
    assert c.dim == 3
    assert spans_equal(c, d3)


def test_commutant_of_block_algebra():
    alg = block_algebra([(2, 1), (1, 1)])
    # independent oracle: solve the commutation equations directly
    basis_mats = list(alg.basis)
    rows = []
    for b in basis_mats:
        rows.append(np.kron(np.eye(3), b.T) - np.kron(b, np.eye(3)))
    stacked = np.vstack(rows)
    _, s, vh = np.linalg.svd(stacked)
    null_dim = int(np.sum(s <= 1e-10)) + (vh.shape[0] - len(s) if vh.shape[0] > len(s) else 0)
    assert commutant(alg).dim == 2 == 9 - np.linalg.matrix_rank(stacked)


def test_double_commutant_recovers_algebra():
    cases = [
        full_matrix_algebra(2),
        diagonal_algebra(3),
        block_algebra([(2, 1), (1, 1)]),
        generate_algebra([SWAP_TENSOR_4], 4),
    ]
    for alg in cases:
        assert spans_equal(commutant(commutant(alg)), alg)


def test_center_of_factor_is_trivial(m2):
    cd = center_and_blocks(m2)
    assert cd.num_blocks == 1
    assert cd.block_dims == [(2, 1)]


def test_center_of_two_blocks(two_by_two_blocks):
    cd = center_and_blocks(two_by_two_blocks)
    assert cd.num_blocks == 2
    assert cd.block_dims == [(2, 1), (2, 1)]
    total = sum(p for p in cd.minimal_central_projections)
    assert max_abs(total - np.eye(4)) <= 1e-10


def test_center_of_swap_generated_algebra():
    # span{I, SWAP} on C^2 (x) C^2: blocks are the symmetric (rank 3) and
    # antisymmetric (rank 1) eigenspaces, both abelian
    alg = generate_algebra([SWAP_TENSOR_4], 4)
    assert alg.dim == 2
    cd = center_and_blocks(alg)
    ranks = sorted(int(round(p.trace().real)) for p in cd.minimal_central_projections)
    assert ranks == [1, 3]
    assert sorted(cd.block_dims) == [(1, 1), (1, 3)]
    sym = 0.5 * (np.eye(4) + SWAP_TENSOR_4)
    assert any(max_abs(p - sym) <= 1e-9 for p in cd.minimal_central_projections)


def test_block_sizes_square_sum_matches_span_dim():
    for blocks in ([(2, 1)], [(2, 1), (3, 1)], [(2, 2)], [(1, 1)] * 4):
        alg = block_algebra(blocks)
        cd = center_and_blocks(alg)
        assert sum(d * d for d, _ in cd.block_dims) == alg.dim


def test_contains_examples(m2):
    d3 = diagonal_algebra(3)
    assert contains(d3, np.eye(3, dtype=complex))
    x3 = np.zeros((3, 3), dtype=complex)
    x3[0, 1] = x3[1, 0] = 1
    assert not contains(d3, x3)
    rngs = np.random.default_rng(23)
    el = random_element(m2, rngs)
    assert contains(m2, el)


def test_contains_rejects_wrong_dim(m2):
    with pytest.raises(DimensionMismatchError):
        contains(m2, np.eye(3))


def test_mvn_reflexive_with_projection_witness(m2):
    e = np.diag([1.0, 0.0]).astype(complex)
    ok, v = mvn_equivalent(m2, e, e)
    assert ok
    assert max_abs(v - e) <= 1e-10


def test_mvn_blocked_by_center(two_by_two_blocks):
    e = np.diag([1.0, 0, 0, 0]).astype(complex)
    f = np.diag([0, 0, 1.0, 0]).astype(complex)
    ok, v = mvn_equivalent(two_by_two_blocks, e, f)
    assert not ok and v is None


def test_mvn_in_full_m3_with_witness():
    m3 = full_matrix_algebra(3)
    e = np.diag([1.0, 0, 0]).astype(complex)
    f = np.diag([0, 0, 1.0]).astype(complex)
    ok, v = mvn_equivalent(m3, e, f)
    assert ok
    assert max_abs(dagger(v) @ v - e) <= 1e-9
    assert max_abs(v @ dagger(v) - f) <= 1e-9


def test_mvn_is_equivalence_relation_on_seeded_pairs():
    # reflexive, symmetric via witness adjoint, transitive via composition
    rngs = np.random.default_rng(31)
    algebras = [full_matrix_algebra(3), block_algebra([(2, 1), (2, 1)]),
                diagonal_algebra(4)]
    checked = 0
    while checked < 200:
        alg = algebras[checked % len(algebras)]
        n = alg.ambient_dim
        h1 = sum(rngs.standard_normal() * b for b in hermitian_basis(alg))
        from ergodica.numerics import hermitian_eigendecomposition
        w, vv = hermitian_eigendecomposition(h1)
        k = int(rngs.integers(1, n))
        e = vv[:, :k] @ dagger(vv[:, :k])
        h2 = sum(rngs.standard_normal() * b for b in hermitian_basis(alg))
        w2, vv2 = hermitian_eigendecomposition(h2)
        f = vv2[:, :k] @ dagger(vv2[:, :k])
        if not (contains(alg, e) and contains(alg, f)):
            checked += 1
            continue
        ok_ef, v_ef = mvn_equivalent(alg, e, f, seed=checked)
        ok_ee, v_ee = mvn_equivalent(alg, e, e, seed=checked)
        assert ok_ee and max_abs(dagger(v_ee) @ v_ee - e) <= 1e-8
        if ok_ef:
            # symmetry: the adjoint witnesses F ~ E
            assert max_abs(dagger(v_ef) @ v_ef - e) <= 1e-8
            assert max_abs(v_ef @ dagger(v_ef) - f) <= 1e-8
            ok_fe, v_fe = mvn_equivalent(alg, f, e, seed=checked)
            assert ok_fe
            # transitivity: compose E ~ F with F ~ E back to E ~ E
            comp = v_fe @ v_ef
            assert max_abs(dagger(comp) @ comp - e) <= 1e-7
            assert max_abs(comp @ dagger(comp) - e) <= 1e-7
        checked += 1


def test_mvn_rejects_non_projection(m2):
    with pytest.raises(NotInAlgebraError):
        mvn_equivalent(m2, PAULI_X, np.diag([1.0, 0]).astype(complex))


def test_cutdown_by_identity_is_same_algebra(m2):
    sub, r = cutdown(m2, np.eye(2, dtype=complex))
    assert sub.dim == m2.dim
    assert max_abs(r @ dagger(r) - np.eye(2)) <= 1e-12


def test_cutdown_full_m3_by_rank2():
    m3 = full_matrix_algebra(3)
    e = np.diag([1.0, 1.0, 0.0]).astype(complex)
    sub, r = cutdown(m3, e)
    assert sub.ambient_dim == 2
    # oracle: compressed generators regenerate a 4-dimensional algebra
    regen = generate_algebra([dagger(r) @ b @ r for b in m3.basis[:3]], 2)
    assert sub.dim == 4 == regen.dim


def test_cutdown_diagonal():
    d4 = diagonal_algebra(4)
    e = np.diag([1.0, 1.0, 0, 0]).astype(complex)
    sub, _ = cutdown(d4, e)
    assert sub.ambient_dim == 2 and sub.dim == 2


def test_is_projection_predicate():
    assert is_projection(np.diag([1.0, 0.0]))
    assert not is_projection(0.5 * np.eye(2))
