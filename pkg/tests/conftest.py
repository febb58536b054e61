import numpy as np
import pytest

from ergodica.actions import action_from_unitaries
from ergodica.algebra import block_algebra, diagonal_algebra, full_matrix_algebra
from ergodica.groups import cyclic_group
from ergodica.numerics import DEFAULT_TOL

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)

SWAP_BLOCKS_4 = np.zeros((4, 4), dtype=complex)
SWAP_BLOCKS_4[0, 2] = SWAP_BLOCKS_4[1, 3] = SWAP_BLOCKS_4[2, 0] = SWAP_BLOCKS_4[3, 1] = 1.0

SWAP_TENSOR_4 = np.zeros((4, 4), dtype=complex)
for _i in (0, 3):
    SWAP_TENSOR_4[_i, _i] = 1.0
SWAP_TENSOR_4[1, 2] = SWAP_TENSOR_4[2, 1] = 1.0


@pytest.fixture
def tol():
    return DEFAULT_TOL


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def m2():
    return full_matrix_algebra(2)


@pytest.fixture
def two_by_two_blocks():
    return block_algebra([(2, 1), (2, 1)])


@pytest.fixture
def swap_action(two_by_two_blocks):
    return action_from_unitaries(
        cyclic_group(2), two_by_two_blocks,
        {(0,): np.eye(4, dtype=complex), (1,): SWAP_BLOCKS_4})


def random_hermitian(rng, n):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (x + x.conj().T)


def random_density(rng, n, floor=0.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T + floor * np.eye(n)
    return rho / rho.trace().real
