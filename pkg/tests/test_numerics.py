import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodica.errors import (
    InternalError,
    NotHermitianError,
    NotPSDError,
    NotSquareError,
    SingularMatrixError,
)
from ergodica.numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    antilinear_polar_decomposition,
    dagger,
    hermitian_eigendecomposition,
    max_abs,
    nullspace_from_gram,
    orthonormalize_matrices,
    support_projection_of_psd,
)

from .conftest import PAULI_X, random_hermitian


def test_tolerance_ordering_enforced():
    with pytest.raises(ValueError):
        ToleranceConfig(atol=1e-8, rank_tol=1e-10)
    with pytest.raises(ValueError):
        ToleranceConfig(atol=0.0, rank_tol=1e-8)
    cfg = ToleranceConfig()
    assert cfg.atol == 1e-10 and cfg.rank_tol == 1e-8


def test_eigen_diagonal_case():
    w, v = hermitian_eigendecomposition(np.diag([2.0, 1.0]))
    assert np.allclose(w, [1.0, 2.0])
    assert np.allclose(v, [[0, 1], [1, 0]])


def test_eigen_pauli_x():
    w, v = hermitian_eigendecomposition(PAULI_X)
    assert np.allclose(w, [-1.0, 1.0])
    s = 1 / np.sqrt(2)
    assert np.allclose(v[:, 0], [s, -s])
    assert np.allclose(v[:, 1], [s, s])


def test_eigen_reconstruction_seeded_6x6():
    rngs = np.random.default_rng(7)
    h = random_hermitian(rngs, 6)
    w, v = hermitian_eigendecomposition(h)
    assert max_abs(h - v @ np.diag(w) @ dagger(v)) <= 1e-10
    assert max_abs(dagger(v) @ v - np.eye(6)) <= DEFAULT_TOL.atol


def test_eigen_matches_lapack_oracle():
    # independent oracle: numpy's LAPACK eigensolver
    rngs = np.random.default_rng(3)
    for n in (2, 3, 5, 8):
        h = random_hermitian(rngs, n)
        w, _ = hermitian_eigendecomposition(h)
        assert np.max(np.abs(w - np.linalg.eigvalsh(h))) <= 1e-11


def test_eigen_rejects_bad_input():
    with pytest.raises(NotSquareError):
        hermitian_eigendecomposition(np.ones((2, 3)))
    with pytest.raises(NotHermitianError):
        hermitian_eigendecomposition(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eigen_deterministic_bytes():
    rngs = np.random.default_rng(11)
    h = random_hermitian(rngs, 7)
    w1, v1 = hermitian_eigendecomposition(h.copy())
    w2, v2 = hermitian_eigendecomposition(h.copy())
    assert w1.tobytes() == w2.tobytes()
    assert v1.tobytes() == v2.tobytes()


def test_eigen_degenerate_spectrum_stays_orthonormal():
    p = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    w, v = hermitian_eigendecomposition(p)
    assert np.allclose(sorted(w), [0, 0, 1, 1])
    assert max_abs(dagger(v) @ v - np.eye(4)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_eigen_reconstruction_property(n, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    w, v = hermitian_eigendecomposition(h)
    assert max_abs(h - (v * w) @ dagger(v)) <= 100 * DEFAULT_TOL.atol * max(1.0, max_abs(h))
    assert np.all(np.diff(w) >= -1e-12)


def test_support_projection_examples():
    assert np.allclose(support_projection_of_psd(np.diag([0.5, 0.5, 0.0])),
                       np.diag([1.0, 1.0, 0.0]))
    assert max_abs(support_projection_of_psd(np.zeros((3, 3)))) == 0.0


def test_support_projection_rank_one():
    rngs = np.random.default_rng(5)
    v = rngs.standard_normal(4) + 1j * rngs.standard_normal(4)
    v /= np.linalg.norm(v)
    rho = np.outer(v, np.conj(v))
    # oracle: the projection is rho itself for a unit vector
    assert max_abs(support_projection_of_psd(rho) - rho) <= 1e-10


def test_support_projection_idempotent_on_projections():
    rngs = np.random.default_rng(9)
    for n in (2, 3, 5):
        h = random_hermitian(rngs, n)
        w, v = hermitian_eigendecomposition(h)
        keep = v[:, : n // 2 + 1]
        p = keep @ dagger(keep)
        assert max_abs(support_projection_of_psd(p) - p) <= 1e-10


def test_support_projection_rejects_negative():
    with pytest.raises(NotPSDError):
        support_projection_of_psd(np.diag([1.0, -0.5]))


def test_polar_identity_case():
    j, dh = antilinear_polar_decomposition(np.eye(3))
    assert max_abs(j - np.eye(3)) <= 1e-12
    assert max_abs(dh - np.eye(3)) <= 1e-12


def test_polar_real_diagonal_case():
    # oracle: Delta = K^T conj(K) = diag(4, 1/4) for K = diag(2, 1/2)
    j, dh = antilinear_polar_decomposition(np.diag([2.0, 0.5]))
    assert max_abs(dh - np.diag([2.0, 0.5])) <= 1e-10
    assert max_abs(j - np.eye(2)) <= 1e-10


def test_polar_reconstruction_seeded():
    rngs = np.random.default_rng(2)
    k = rngs.standard_normal((3, 3)) + 1j * rngs.standard_normal((3, 3))
    j, dh = antilinear_polar_decomposition(k)
    assert max_abs(k - j @ np.conj(dh)) <= 1e-9
    assert max_abs(dagger(j) @ j - np.eye(3)) <= 1e-9  # antiunitary part is unitary


def test_polar_involution_on_involutive_inputs():
    # inputs of the form K = A conj(A)^-1 satisfy K conj(K) = I, the class
    # produced by modular conjugations; the polar part is then an involution
    rngs = np.random.default_rng(13)
    for n in (2, 3, 4):
        a = rngs.standard_normal((n, n)) + 1j * rngs.standard_normal((n, n))
        k = a @ np.linalg.inv(np.conj(a))
        j, dh = antilinear_polar_decomposition(k)
        assert max_abs(k - j @ np.conj(dh)) <= 1e-9
        assert max_abs(j @ np.conj(j) - np.eye(n)) <= 1e-8


def test_polar_reproduces_input_bulk():
    # 1000 seeded invertible matrices, dims 2..6
    rngs = np.random.default_rng(17)
    count = 0
    while count < 1000:
        n = 2 + count % 5
        k = rngs.standard_normal((n, n)) + 1j * rngs.standard_normal((n, n))
        if abs(np.linalg.det(k)) < 1e-3:
            continue
        j, dh = antilinear_polar_decomposition(k)
        assert max_abs(k - j @ np.conj(dh)) <= 100 * DEFAULT_TOL.atol * max(1.0, max_abs(k))
        count += 1


def test_polar_rejects_singular():
    with pytest.raises(SingularMatrixError):
        antilinear_polar_decomposition(np.diag([1.0, 0.0]))


def test_orthonormalize_drops_dependent_directions():
    mats = [np.eye(2, dtype=complex), 2 * np.eye(2, dtype=complex), PAULI_X]
    out = orthonormalize_matrices(mats, 2)
    assert out.shape[0] == 2


def test_nullspace_of_gram():
    g = np.diag([0.0, 1e-20, 2.0, 3.0]).astype(complex)
    null = nullspace_from_gram(g)
    assert null.shape[1] == 2
