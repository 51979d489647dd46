# core/dynamics.py
"""
State propagation under the full non-Hermitian H and under H_B^EWA, and
the a-priori bound on the decaying component ||psi_A(t)||.

Usage:
    from core.dynamics import evolve, evolve_ewa, psi_a_bound
    traj = evolve(full_hamiltonian(sys_), psi0, times, dim_A=sys_.dim_A)
    bound = psi_a_bound(sys_, psi0, t=5.0)
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import DimensionError, ValidationError
from core.ewa import hb_ewa
from core.linalg import ComplexMatrix, ComplexVector, as_square, eig, expm
from core.model import BlockSystem, full_hamiltonian, require_valid

logger = logging.getLogger("zenosim.dynamics")

UNIFORM_GRID_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray          # shape (len(times), dim)
    norms_full: np.ndarray
    norms_A: np.ndarray
    norms_B: np.ndarray
    dim_A: int = 0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def a_states(self) -> np.ndarray:
        return self.states[:, :self.dim_A]

    @property
    def b_states(self) -> np.ndarray:
        return self.states[:, self.dim_A:]


def check_times(times: Sequence[float]) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValidationError("invalid time grid", ["times must be a non-empty 1-D sequence"])
    problems = []
    if t[0] != 0.0:
        problems.append(f"times must start at 0, got {t[0]}")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        problems.append("times must be strictly increasing")
    if not np.all(np.isfinite(t)):
        problems.append("times must be finite")
    if problems:
        raise ValidationError("invalid time grid", problems)
    return t


def propagators(H: ComplexMatrix, times: np.ndarray):
    """Yield e^{-i H t_k} for each grid time; one expm for uniform grids."""
    n = H.shape[0]
    steps = np.diff(times)
    uniform = steps.size > 0 and np.allclose(steps, steps[0], rtol=UNIFORM_GRID_RTOL, atol=0.0)
    u = np.eye(n, dtype=np.complex128)
    yield u
    if uniform:
        step = expm(-1j * H * steps[0])
        for k in range(1, times.size):
            u = step @ u
            yield u
    else:
        for t in times[1:]:
            yield expm(-1j * H * t)


def evolve(H, psi0, times: Sequence[float], dim_A: int = 0) -> Trajectory:
    """
    states[k] = e^{-i H times[k]} psi0. ``dim_A`` splits the per-step norms
    into the A part (first dim_A components) and the B part (the rest).
    """
    h = as_square(H, "Hamiltonian")
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] != h.shape[0]:
        raise DimensionError(f"state of shape {psi.shape} does not match Hamiltonian {h.shape}")
    if not 0 <= dim_A <= h.shape[0]:
        raise DimensionError(f"dim_A = {dim_A} outside [0, {h.shape[0]}]")
    t = check_times(times)

    states = np.stack([u @ psi for u in propagators(h, t)])
    norms_a = np.linalg.norm(states[:, :dim_A], axis=1)
    norms_b = np.linalg.norm(states[:, dim_A:], axis=1)
    return Trajectory(
        times=t,
        states=states,
        norms_full=np.linalg.norm(states, axis=1),
        norms_A=norms_a,
        norms_B=norms_b,
        dim_A=dim_A,
    )


def evolve_ewa(sys_: BlockSystem, psiB0, times: Sequence[float], exact_limit: bool = False) -> Trajectory:
    """B-subspace trajectory under e^{-i H_B^EWA t}; norms_A are zero by construction."""
    psi_b = np.asarray(psiB0, dtype=np.complex128)
    if psi_b.shape != (sys_.dim_B,):
        raise DimensionError(f"B-subspace state must have {sys_.dim_B} components, got {psi_b.shape}")
    return evolve(hb_ewa(sys_, exact_limit=exact_limit).matrix, psi_b, times, dim_A=0)


def evolve_exact(sys_: BlockSystem, psi0, times: Sequence[float]) -> Trajectory:
    return evolve(full_hamiltonian(sys_), psi0, times, dim_A=sys_.dim_A)


def _bound_terms(sys_: BlockSystem, psi0: ComplexVector, times: np.ndarray, conservative: bool) -> np.ndarray:
    gammas = np.asarray(sys_.gammas_A)
    omegas = np.asarray(sys_.omegas_A)
    a0 = np.abs(np.asarray(psi0, dtype=np.complex128)[:sys_.dim_A])
    rows = np.abs(sys_.C_block).sum(axis=1)
    denom = gammas if conservative else np.abs(gammas + 1j * omegas)

    decay = np.exp(-np.outer(times, gammas))                    # (T, dim_A)
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = np.where(denom > 0, (1.0 - decay) / denom, 0.0)
    # Gamma_n = 0 with the conservative denominator: (1 - e^{-Gamma t}) / Gamma -> t
    flat = (denom == 0)
    if flat.any():
        growth[:, flat] = np.asarray(times)[:, None]
    return decay * a0 + growth * rows


def psi_a_bound(sys_: BlockSystem, psi0, t: float, conservative: bool = False) -> float:
    """
    Upper estimate for ||psi_A(t)||, combining the per-level inequality

        |<a_n|psi_A(t)>| <= e^{-Gamma_n t} |<a_n|psi_A(0)>|
                            + (1 - e^{-Gamma_n t}) / |Gamma_n + i omega_n| * sum_m |<a_n|C|m>|

    across n by a Euclidean norm. ``conservative`` replaces |Gamma_n + i omega_n|
    by Gamma_n, which keeps the inequality valid for omega_n != 0.
    """
    require_valid(sys_)
    if t < 0:
        raise ValidationError("bound time must be >= 0", [f"t = {t}"])
    terms = _bound_terms(sys_, psi0, np.array([float(t)]), conservative)[0]
    return float(np.sqrt(np.sum(terms ** 2)))


def psi_a_bound_series(sys_: BlockSystem, psi0, times: Sequence[float], conservative: bool = False) -> np.ndarray:
    require_valid(sys_)
    t = np.asarray(times, dtype=float)
    return np.sqrt(np.sum(_bound_terms(sys_, psi0, t, conservative) ** 2, axis=1))


def norm_decay_rate(sys_: BlockSystem, psi) -> float:
    """d/dt ||psi||^2 = -2 sum_n Gamma_n |<a_n|psi>|^2."""
    a = np.asarray(psi, dtype=np.complex128)[:sys_.dim_A]
    return float(-2.0 * np.sum(np.asarray(sys_.gammas_A) * np.abs(a) ** 2))


def spectral_decay_rates(sys_: BlockSystem) -> np.ndarray:
    """Decay rates of the eigenmodes of H, taken as -Im(lambda_k), sorted descending."""
    lam, _ = eig(full_hamiltonian(sys_))
    return np.sort(-np.imag(lam))[::-1]
