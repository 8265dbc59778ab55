# fv_system/qop/basis.py
"""Single-site operator bases: generalized Gell-Mann matrices."""
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

PAULI: Dict[str, np.ndarray] = {
    "i": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@lru_cache(maxsize=16)
def gell_mann_basis(d: int) -> Tuple[np.ndarray, ...]:
    """
    Hermitian orthogonal basis of d x d matrices, identity first.

    Order: identity, symmetric pairs (j<k), antisymmetric pairs (j<k),
    diagonal generators. For d=2 this is (I, X, Y, Z).

    Args:
        d: Local dimension

    Returns:
        Tuple of d*d read-only arrays
    """
    basis = [np.eye(d, dtype=np.complex128)]

    symmetric, antisymmetric = [], []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=np.complex128)
            s[j, k] = s[k, j] = 1
            symmetric.append(s)
            a = np.zeros((d, d), dtype=np.complex128)
            a[j, k] = -1j
            a[k, j] = 1j
            antisymmetric.append(a)

    diagonal = []
    for l in range(1, d):
        diag = np.zeros(d, dtype=np.complex128)
        diag[:l] = 1
        diag[l] = -l
        diagonal.append(np.diag(diag) * np.sqrt(2.0 / (l * (l + 1))))

    basis += symmetric + antisymmetric + diagonal

    for m in basis:
        m.setflags(write=False)
    return tuple(basis)


def basis_element(d: int, index: int) -> np.ndarray:
    return gell_mann_basis(d)[index]


def projector(d: int, level: int) -> np.ndarray:
    p = np.zeros((d, d), dtype=np.complex128)
    p[level, level] = 1
    return p
