# fv_system/qop/random_ops.py
"""
Seeded random operators and the named-stream seed splitter.

Every function takes either an integer seed or a caller-owned
numpy Generator; no global RNG state is touched.
"""
import hashlib
from typing import Optional, Union

import numpy as np

from fv_system.models.operator import DensityState, Effect, Operator, SlotLayout

SeedLike = Union[int, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


def substream_seed(seed: int, *names: object) -> int:
    """
    Derive an independent 64-bit seed for a named substream.

    Example:
        trial_seed = substream_seed(config_seed, "campaign", "sorkin", 17)
    """
    key = tuple(
        int.from_bytes(hashlib.sha256(str(name).encode("utf-8")).digest()[:4], "big")
        for name in names
    )
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _layout(dim: int, layout: Optional[SlotLayout]) -> SlotLayout:
    if layout is None:
        return SlotLayout.of([("q", dim)])
    return layout


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(dim: int, seed: SeedLike, layout: Optional[SlotLayout] = None) -> Operator:
    """Haar unitary: QR of a complex Gaussian matrix with phase-fixed R."""
    rng = make_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return Operator(q, _layout(dim, layout))


def random_density(dim: int, seed: SeedLike, layout: Optional[SlotLayout] = None,
                   rank: Optional[int] = None) -> DensityState:
    """Normalized G·G† for a dim x rank complex Gaussian G (full rank by default)."""
    rng = make_rng(seed)
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityState(rho / np.trace(rho).real, _layout(dim, layout))


def random_pure_state(dim: int, seed: SeedLike, layout: Optional[SlotLayout] = None) -> DensityState:
    return random_density(dim, seed, layout, rank=1)


def random_product_state(layout: SlotLayout, seed: SeedLike) -> DensityState:
    """Tensor product of independent random pure states, one per slot."""
    rng = make_rng(seed)
    rho = np.ones((1, 1), dtype=np.complex128)
    for _, dim in layout.slots:
        psi = _ginibre(rng, dim, 1)
        psi = psi / np.linalg.norm(psi)
        rho = np.kron(rho, psi @ psi.conj().T)
    return DensityState(rho, layout)


def random_effect(dim: int, seed: SeedLike, layout: Optional[SlotLayout] = None) -> Effect:
    """U · diag(uniform[0,1]) · U†."""
    rng = make_rng(seed)
    u = random_unitary(dim, rng).matrix
    spectrum = rng.uniform(0.0, 1.0, size=dim)
    e = (u * spectrum) @ u.conj().T
    return Effect((e + e.conj().T) / 2, _layout(dim, layout))


def random_hermitian(dim: int, seed: SeedLike, layout: Optional[SlotLayout] = None) -> Operator:
    rng = make_rng(seed)
    g = _ginibre(rng, dim, dim)
    return Operator((g + g.conj().T) / 2, _layout(dim, layout))


__all__ = [
    'SeedLike',
    'make_rng',
    'substream_seed',
    'random_unitary',
    'random_density',
    'random_pure_state',
    'random_product_state',
    'random_effect',
    'random_hermitian',
]
