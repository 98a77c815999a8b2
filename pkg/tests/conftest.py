import functools

import numpy as np
import pytest

from anyonsim.lattice import build

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(p, n):
    """Explicit 2^n x 2^n matrix; site j is bit j of the basis index."""
    m = np.array([[1]], dtype=complex)
    # Kronecker order: most significant bit first, so site n-1 leads.
    for site in reversed(range(n)):
        m = np.kron(m, _SINGLE[p.letter(site)])
    return p.phase * m


@pytest.fixture(scope="session")
def torus():
    return build(4, 2, "torus")


@pytest.fixture(scope="session")
def patch():
    return build(6, 6, "open")


@functools.lru_cache(maxsize=None)
def cached_ground(rows, cols, boundary):
    from anyonsim.stabilizer import prepare_ground

    return prepare_ground(build(rows, cols, boundary))
