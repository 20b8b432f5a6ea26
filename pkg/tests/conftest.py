import numpy as np
import pytest

SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def kron_string(alpha):
    """Independent dense oracle for Pauli strings."""
    out = np.array([[1.0 + 0j]])
    for a in alpha:
        out = np.kron(out, SIGMA[a])
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)
