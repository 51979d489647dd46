# core/fidelity.py
"""
Fidelity functionals comparing the exact dynamics with the EWA and the
uncoupled (Zeno) B dynamics.

    F_EWA(t) = |<Pi_B psi(t) | psi_B^EWA(t)>| / (||Pi_B psi(t)|| ||psi_B^EWA(t)||)
    F_Z(t)   = |<Pi_B psi(t) | e^{-iBt} Pi_B psi(0)>|
    F_ZN(t)  = F_Z(t) / (||Pi_B psi(t)|| ||Pi_B psi(0)||)

psi(t) = e^{-iHt} psi(0) on the full space; the B-block propagators act on
the B components of psi(0). A normalizer, or their product, below DENOM_GUARD marks
the sample as fully decayed: its value is NaN and the flag names the metric.

Usage:
    from core.fidelity import fidelity_series, f_ewa
    series = fidelity_series(sys_, psi0, times)
    series.minima()          # {"f_ewa": ..., "f_z": ..., "f_zn": ...}
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from core.dynamics import Trajectory, check_times, evolve, evolve_ewa, evolve_exact
from core.errors import DimensionError, ValidationError
from core.linalg import expm
from core.model import BlockSystem, b_part, full_hamiltonian, require_unit, require_valid
from core.ewa import hb_ewa

logger = logging.getLogger("zenosim.fidelity")

DENOM_GUARD = 1e-12
FLAG_SEP = "|"


@dataclass(frozen=True, eq=False)
class FidelitySeries:
    times: np.ndarray
    f_ewa: np.ndarray
    f_z: np.ndarray
    f_zn: np.ndarray
    flags: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.times)

    @property
    def flagged(self) -> int:
        return sum(1 for f in self.flags if f)

    def minima(self) -> Dict[str, float]:
        return {name: _nan_stat(np.nanmin, getattr(self, name)) for name in ("f_ewa", "f_z", "f_zn")}

    def means(self) -> Dict[str, float]:
        return {name: _nan_stat(np.nanmean, getattr(self, name)) for name in ("f_ewa", "f_z", "f_zn")}


def _nan_stat(fn, values: np.ndarray) -> float:
    if np.all(np.isnan(values)):
        return float("nan")
    return float(fn(values))


def _guarded(num: np.ndarray, left: np.ndarray, right: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """num / (left * right), NaN wherever either normalizer or their product is below DENOM_GUARD."""
    left, right = np.asarray(left, dtype=float), np.asarray(right, dtype=float)
    bad = (left < DENOM_GUARD) | (right < DENOM_GUARD) | (left * right < DENOM_GUARD)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(bad, np.nan, num / np.where(bad, 1.0, left * right))
    return val, bad


def _check_inputs(sys_: BlockSystem, psi0) -> np.ndarray:
    require_valid(sys_)
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.shape != (sys_.dim,):
        raise DimensionError(f"initial state must have {sys_.dim} components, got {psi.shape}")
    return require_unit(psi)


def _single_time(sys_: BlockSystem, psi0, t: float) -> Tuple[np.ndarray, np.ndarray]:
    psi = _check_inputs(sys_, psi0)
    if not (np.isfinite(t) and t >= 0):
        raise ValidationError(f"time must be finite and >= 0, got {t}")
    psi_b_t = b_part(sys_, expm(-1j * full_hamiltonian(sys_) * t) @ psi)
    return psi, psi_b_t


def f_ewa(sys_: BlockSystem, psi0, t: float, exact_limit: bool = False) -> float:
    psi, psi_b_t = _single_time(sys_, psi0, t)
    phi = expm(-1j * hb_ewa(sys_, exact_limit=exact_limit).matrix * t) @ b_part(sys_, psi)
    num = abs(np.vdot(psi_b_t, phi))
    val, _ = _guarded(np.array([num]), np.array([np.linalg.norm(psi_b_t)]), np.array([np.linalg.norm(phi)]))
    return float(val[0])


def f_z(sys_: BlockSystem, psi0, t: float) -> float:
    psi, psi_b_t = _single_time(sys_, psi0, t)
    free = expm(-1j * sys_.B_block * t) @ b_part(sys_, psi)
    return float(abs(np.vdot(psi_b_t, free)))


def f_zn(sys_: BlockSystem, psi0, t: float) -> float:
    psi, psi_b_t = _single_time(sys_, psi0, t)
    psi_b0 = b_part(sys_, psi)
    num = abs(np.vdot(psi_b_t, expm(-1j * sys_.B_block * t) @ psi_b0))
    val, _ = _guarded(np.array([num]), np.array([np.linalg.norm(psi_b_t)]), np.array([np.linalg.norm(psi_b0)]))
    return float(val[0])


def _overlap(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.abs(np.sum(u.conj() * v, axis=1))


def fidelity_series(sys_: BlockSystem, psi0, times: Sequence[float],
                    exact: Optional[Trajectory] = None, ewa: Optional[Trajectory] = None,
                    exact_limit: bool = False) -> FidelitySeries:
    """
    All three metrics on a time grid. Precomputed exact/EWA trajectories on
    the same grid may be passed in to avoid recomputing them.
    """
    psi = _check_inputs(sys_, psi0)
    t = check_times(times)
    psi_b0 = b_part(sys_, psi)

    exact = exact if exact is not None else evolve_exact(sys_, psi, t)
    ewa = ewa if ewa is not None else evolve_ewa(sys_, psi_b0, t, exact_limit=exact_limit)
    if len(exact) != t.size or len(ewa) != t.size:
        raise DimensionError("trajectories do not match the time grid")
    free = evolve(sys_.B_block, psi_b0, t)

    b_exact = exact.b_states
    val_ewa, bad_ewa = _guarded(_overlap(b_exact, ewa.states), exact.norms_B, ewa.norms_full)
    numer_z = _overlap(b_exact, free.states)
    val_zn, bad_zn = _guarded(numer_z, exact.norms_B, np.full(t.size, np.linalg.norm(psi_b0)))

    flags = tuple(
        FLAG_SEP.join(name for name, bad in (("f_ewa", e), ("f_zn", z)) if bad)
        for e, z in zip(bad_ewa, bad_zn)
    )
    n_flagged = sum(1 for f in flags if f)
    if n_flagged:
        logger.warning("fidelity_series: %d of %d samples fully decayed (normalizer < %.0e)",
                       n_flagged, t.size, DENOM_GUARD)
    return FidelitySeries(times=t, f_ewa=val_ewa, f_z=numer_z, f_zn=val_zn, flags=flags)
