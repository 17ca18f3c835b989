import numpy as np
import pytest

from keyrecycle.ptc import chau_family


@pytest.fixture(scope="session")
def chau11():
    return chau_family(1, 1)


@pytest.fixture(scope="session")
def chau12():
    return chau_family(1, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# Independent dense Pauli matrices, built from 2x2 blocks with np.kron.
_I2 = np.eye(2)
_X2 = np.array([[0, 1], [1, 0]])
_Z2 = np.diag([1, -1])


def dense_pauli(x, z):
    out = np.ones((1, 1))
    for a, b in zip(x, z):
        out = np.kron(out, (_X2 if a else _I2) @ (_Z2 if b else _I2))
    return out.astype(complex)


def equal_up_to_phase(a, b, tol=1e-9):
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    return abs(abs(np.vdot(a, b)) - np.linalg.norm(a) * np.linalg.norm(b)) < tol
