# zeno/utils/random_systems.py
"""
Seeded random block systems for property tests.

Usage:
    from zeno.utils.random_systems import random_system, random_state
    sys_ = random_system(rng, dim_A=2, dim_B=2, gamma_over_c=10.0)
    psi0 = random_state(rng, sys_.dim, a_weight=0.3, dim_A=sys_.dim_A)
"""
from __future__ import annotations
from typing import Optional

import numpy as np

from core.model import BlockSystem


def random_complex(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    """Entries with modulus uniform in [0, scale] and uniform phase."""
    mag = rng.uniform(0.0, scale, size=shape)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    return mag * np.exp(1j * phase)


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0, diagonal: bool = False) -> np.ndarray:
    if diagonal:
        return np.diag(rng.uniform(-scale, scale, size=n)).astype(np.complex128)
    m = random_complex(rng, (n, n), scale)
    return 0.5 * (m + m.conj().T)


def random_system(rng: np.random.Generator, dim_A: int = 1, dim_B: int = 2, gamma_over_c: float = 10.0,
                  c_max: float = 0.5, zero_omegas: bool = False, diagonal_b: bool = False,
                  omega_scale: float = 1.0) -> BlockSystem:
    """
    Decay rates are drawn from [gamma_over_c * c_max, 2 * gamma_over_c * c_max],
    so Gamma_n / max|c_ij| >= gamma_over_c holds for every level.
    """
    c = random_complex(rng, (dim_A, dim_B), c_max)
    gammas = rng.uniform(gamma_over_c * c_max, 2.0 * gamma_over_c * c_max, size=dim_A)
    omegas = np.zeros(dim_A) if zero_omegas else rng.uniform(-omega_scale, omega_scale, size=dim_A)
    return BlockSystem(
        omegas_A=tuple(omegas),
        gammas_A=tuple(gammas),
        B_block=random_hermitian(rng, dim_B, diagonal=diagonal_b),
        C_block=c,
    )


def random_state(rng: np.random.Generator, dim: int, a_weight: Optional[float] = None, dim_A: int = 0) -> np.ndarray:
    """
    Unit vector. With ``a_weight`` set, the first dim_A components carry
    exactly that share of the squared norm (0 gives a state supported on B).
    """
    v = random_complex(rng, dim) + 1e-3
    if a_weight is None:
        return v / np.linalg.norm(v)
    a, b = v[:dim_A], v[dim_A:]
    out = np.zeros(dim, dtype=np.complex128)
    if dim_A and a_weight > 0:
        out[:dim_A] = np.sqrt(a_weight) * a / np.linalg.norm(a)
    out[dim_A:] = np.sqrt(1.0 - a_weight) * b / np.linalg.norm(b)
    return out
