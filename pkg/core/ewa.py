# core/ewa.py
"""
Evanescent wave approximation (EWA) effective Hamiltonians.

Usage:
    from core.ewa import EwaConfig, db_ewa, hb_ewa, d_blocks_numeric, heff_full
    cfg = EwaConfig.for_system(sys_)              # Delta t = 30 / min Gamma
    D_A, D_B = d_blocks_numeric(sys_, cfg)        # quadrature of the window integrals
    H_B = hb_ewa(sys_).matrix                     # B - i D_B^EWA

Conventions
-----------
The interaction picture over a window [t, t + Delta t] uses tau = s - t, so
nothing depends on t. With A diagonal (a_n = omega_n - i Gamma_n):

    C_up(tau)   (A x B block) = e^{i A tau} C e^{-i B tau}
    C_down(tau) (B x A block) = e^{i B tau} C^dagger e^{-i A tau}

e^{i A tau} grows like e^{Gamma_n tau}. The two block propagators are applied
separately and the product is never formed on the full space; Gamma_n Delta t
is capped at EVANESCENT_CAP to stay far from double overflow.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from core.errors import QuadratureRangeError, SingularConfigurationError, ValidationError
from core.linalg import ComplexMatrix, integrate_matrix
from core.model import BlockSystem, require_valid

logger = logging.getLogger("zenosim.ewa")

DEFAULT_DELTA_T_FACTOR = 30.0
DEFAULT_QUADRATURE_N = 2000
EVANESCENT_CAP = 200.0
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class EwaConfig:
    delta_t: float
    quadrature_n: int = DEFAULT_QUADRATURE_N

    def __post_init__(self):
        problems = []
        if not (np.isfinite(self.delta_t) and self.delta_t > 0):
            problems.append(f"delta_t must be > 0, got {self.delta_t}")
        if self.quadrature_n < 2 or self.quadrature_n % 2:
            problems.append(f"quadrature_n must be even and >= 2, got {self.quadrature_n}")
        if problems:
            raise ValidationError("invalid EWA configuration", problems)

    @classmethod
    def for_system(cls, sys_: BlockSystem, delta_t_factor: float = DEFAULT_DELTA_T_FACTOR,
                   quadrature_n: int = DEFAULT_QUADRATURE_N) -> "EwaConfig":
        """Delta t = delta_t_factor / min_n Gamma_n (over decaying levels)."""
        gammas = np.asarray(sys_.gammas_A, dtype=float)
        positive = gammas[gammas > 0]
        if positive.size == 0:
            raise ValidationError("cannot choose an EWA window", ["no A level has Gamma_n > 0"])
        return cls(delta_t=float(delta_t_factor / positive.min()), quadrature_n=quadrature_n)


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonianB:
    matrix: ComplexMatrix
    d_b: ComplexMatrix


def _bare_b_energies(sys_: BlockSystem) -> np.ndarray:
    return np.real(np.diag(sys_.B_block))


def db_ewa(sys_: BlockSystem) -> ComplexMatrix:
    """
    Closed-form dressing of the B block:

        (D_B)_{m m'} = sum_n c*_{nm} c_{nm'} / (Gamma_n + i (omega_n - omega_{m'}))

    with omega_{m'} the bare diagonal entries of B.
    """
    require_valid(sys_)
    C = sys_.C_block
    gammas = np.asarray(sys_.gammas_A)
    omegas = np.asarray(sys_.omegas_A)
    denom = gammas[:, None] + 1j * (omegas[:, None] - _bare_b_energies(sys_)[None, :])

    tiny = np.abs(denom) < SINGULAR_TOL
    singular = tiny & (np.abs(C) > 0)
    if singular.any():
        pairs = [(int(n), int(m)) for n, m in zip(*np.nonzero(singular))]
        raise SingularConfigurationError(
            f"zero EWA denominator (Gamma_n = 0 and omega_n = omega_m') with nonzero coupling at (n, m') = {pairs}")

    # rows with zero coupling contribute nothing; keep their weights at 0
    weights = np.where(tiny, 0.0, C / np.where(tiny, 1.0, denom))
    return C.conj().T @ weights


def db_ewa_resolvent(sys_: BlockSystem) -> ComplexMatrix:
    """
    Delta t -> infinity limit of the quadrature D_B for a general Hermitian B:

        D_B = sum_n C^dagger |n><n| C (Gamma_n + i omega_n - i B)^{-1}

    Equal to db_ewa when B is diagonal. For off-diagonal B the two differ at
    relative order |g| / Gamma.
    """
    require_valid(sys_)
    C = sys_.C_block
    B = sys_.B_block
    ident = np.eye(sys_.dim_B, dtype=np.complex128)
    out = np.zeros((sys_.dim_B, sys_.dim_B), dtype=np.complex128)
    for n, (w, g) in enumerate(zip(sys_.omegas_A, sys_.gammas_A)):
        row = C[n]
        if not np.any(row):
            continue
        kernel = (g + 1j * w) * ident - 1j * B
        if np.linalg.cond(kernel) > 1.0 / SINGULAR_TOL:
            raise SingularConfigurationError(
                f"resolvent singular for A level {n}: Gamma_n = 0 and omega_n is an eigenvalue of B")
        out += np.outer(row.conj(), row) @ np.linalg.inv(kernel)
    return out


class _BlockPropagators:
    """e^{-i A tau} (diagonal) and e^{-i B tau} (via B's eigenbasis)."""

    def __init__(self, sys_: BlockSystem):
        self.a = sys_.a_diagonal
        lam, vecs = np.linalg.eigh(sys_.B_block)
        self._lam = lam
        self._v = vecs
        self._v_inv = vecs.conj().T

    def a_phase(self, tau: float) -> np.ndarray:
        """Diagonal of e^{-i A tau}; tau < 0 gives the growing branch."""
        return np.exp(-1j * self.a * tau)

    def b(self, tau: float) -> ComplexMatrix:
        """e^{-i B tau}."""
        return (self._v * np.exp(-1j * self._lam * tau)) @ self._v_inv


def _check_window(sys_: BlockSystem, cfg: EwaConfig) -> None:
    exponent = max(sys_.gammas_A) * cfg.delta_t
    if exponent > EVANESCENT_CAP:
        raise QuadratureRangeError(
            f"max Gamma_n * Delta t = {exponent:.1f} exceeds {EVANESCENT_CAP:.0f}; "
            f"reduce Delta t (e.g. a smaller delta_t_factor)")


def d_blocks_numeric(sys_: BlockSystem, cfg: EwaConfig) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Quadrature evaluation of the window dressings

        D_A = e^{-i H0 dt} C_up(dt)   [int_0^dt C_down(eta) d eta] e^{i H0 dt}   (A x A)
        D_B = e^{-i H0 dt} C_down(dt) [int_0^dt C_up(eta)   d eta] e^{i H0 dt}   (B x B)

    Returns (D_A, D_B). D_B tends to db_ewa as Gamma_n dt grows. D_A carries
    the factor e^{+Gamma_n dt} from the right-hand e^{i A dt}.
    """
    require_valid(sys_)
    _check_window(sys_, cfg)
    dt, n = cfg.delta_t, cfg.quadrature_n
    C = sys_.C_block
    Cd = C.conj().T
    prop = _BlockPropagators(sys_)

    def c_up(tau: float) -> ComplexMatrix:
        return prop.a_phase(-tau)[:, None] * C @ prop.b(tau)

    def c_down(tau: float) -> ComplexMatrix:
        return prop.b(-tau) @ (Cd * prop.a_phase(tau)[None, :])

    int_up = integrate_matrix(c_up, 0.0, dt, n)
    int_down = integrate_matrix(c_down, 0.0, dt, n)

    d_b = prop.b(dt) @ c_down(dt) @ int_up @ prop.b(-dt)
    d_a = prop.a_phase(dt)[:, None] * (c_up(dt) @ int_down) * prop.a_phase(-dt)[None, :]
    logger.debug("d_blocks_numeric: dt=%.4g n=%d max|D_B|=%.3e", dt, n, np.abs(d_b).max())
    return d_a, d_b


def hb_ewa(sys_: BlockSystem, exact_limit: bool = False) -> EffectiveHamiltonianB:
    """H_B^EWA = B - i D_B^EWA (resolvent limit when exact_limit is set)."""
    d_b = db_ewa_resolvent(sys_) if exact_limit else db_ewa(sys_)
    return EffectiveHamiltonianB(matrix=sys_.B_block - 1j * d_b, d_b=d_b)


def heff_full(sys_: BlockSystem, cfg: EwaConfig) -> ComplexMatrix:
    """Upper block-triangular [[A - i D_A, C], [0, B - i D_B]]."""
    d_a, d_b = d_blocks_numeric(sys_, cfg)
    da = sys_.dim_A
    h = np.zeros((sys_.dim, sys_.dim), dtype=np.complex128)
    h[:da, :da] = np.diag(sys_.a_diagonal) - 1j * d_a
    h[:da, da:] = sys_.C_block
    h[da:, da:] = sys_.B_block - 1j * d_b
    return h


def ewa_validity(sys_: BlockSystem, cfg: EwaConfig) -> Dict[str, float]:
    """Gamma = min Gamma_n, c = max |c_ij|, their ratio and the discarded factor max e^{-Gamma_n dt}."""
    require_valid(sys_)
    gammas = np.asarray(sys_.gammas_A)
    coupled = np.any(np.abs(sys_.C_block) > 0, axis=1)
    relevant = gammas[coupled] if coupled.any() else gammas
    gamma_min = float(relevant.min())
    c_max = float(np.abs(sys_.C_block).max())
    return {
        "gamma_min": gamma_min,
        "c_max": c_max,
        "gamma_over_c": float("inf") if c_max == 0 else gamma_min / c_max,
        "evanescent_factor": float(np.exp(-gamma_min * cfg.delta_t)),
    }


def pseudo_lamb_shifts(sys_: BlockSystem, exact_limit: bool = False) -> Dict[str, np.ndarray]:
    """
    Read H_B^EWA = B - i D_B as physics: energy shifts Im(D_mm), induced
    decay rates Re(D_mm) and effective couplings -i D_mm' (m != m').
    """
    d_b = db_ewa_resolvent(sys_) if exact_limit else db_ewa(sys_)
    couplings = -1j * d_b.copy()
    np.fill_diagonal(couplings, 0.0)
    return {
        "energy_shifts": np.imag(np.diag(d_b)).copy(),
        "decay_rates": np.real(np.diag(d_b)).copy(),
        "couplings": couplings,
    }
