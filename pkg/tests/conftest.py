import numpy as np
import pytest

from unsharp.linalg import HermitianOp
from unsharp.states import pure

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])


def random_hermitian(rng, dim, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOp(scale * (m + m.conj().T) / 2)


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def zero_state():
    return pure(KET0)


@pytest.fixture
def one_state():
    return pure(KET1)
