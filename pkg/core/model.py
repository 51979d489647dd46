# core/model.py
"""
Block-structured non-Hermitian system model.

    H = H_0 + H_I,   H_0 = [[A, 0], [0, B]],   H_I = [[0, C], [C^dagger, 0]]

with A = diag(omega_n - i Gamma_n) (decaying levels) and B Hermitian.
Basis order is A states first, then B states. The state labels map as
|1>, |2> -> first and second B basis vectors, |3>, |4> -> A basis vectors.

Usage:
    from core.model import BlockSystem, Scenario, full_hamiltonian, initial_state
    sys_ = BlockSystem(omegas_A=(0.0,), gammas_A=(5.0,),
                       B_block=[[0, 0.5], [0.5, 1]], C_block=[[0.5, 0.5]])
    H = full_hamiltonian(sys_)
"""
from __future__ import annotations
import dataclasses
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ValidationError
from core.linalg import ComplexMatrix, ComplexVector

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != ndim:
        arr = np.atleast_2d(arr) if ndim == 2 else arr
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BlockSystem:
    omegas_A: Tuple[float, ...]
    gammas_A: Tuple[float, ...]
    B_block: ComplexMatrix
    C_block: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, "omegas_A", tuple(float(w) for w in self.omegas_A))
        object.__setattr__(self, "gammas_A", tuple(float(g) for g in self.gammas_A))
        object.__setattr__(self, "B_block", _frozen_array(self.B_block, 2))
        object.__setattr__(self, "C_block", _frozen_array(self.C_block, 2))

    @property
    def dim_A(self) -> int:
        return len(self.omegas_A)

    @property
    def dim_B(self) -> int:
        return int(self.B_block.shape[0])

    @property
    def dim(self) -> int:
        return self.dim_A + self.dim_B

    @property
    def a_diagonal(self) -> np.ndarray:
        """Complex diagonal of A: omega_n - i Gamma_n."""
        return np.asarray(self.omegas_A) - 1j * np.asarray(self.gammas_A)

    def replace(self, **changes) -> "BlockSystem":
        return dataclasses.replace(self, **changes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlockSystem):
            return NotImplemented
        return (self.omegas_A == other.omegas_A
                and self.gammas_A == other.gammas_A
                and np.array_equal(self.B_block, other.B_block)
                and np.array_equal(self.C_block, other.C_block))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Scenario:
    system: BlockSystem
    p_A: float = 0.0
    theta: float = 0.0
    t_max: float = 20.0
    n_steps: int = 400
    label: str = ""
    amplitudes: Optional[Tuple[complex, ...]] = None
    delta_t_factor: float = 30.0
    quadrature_n: int = 2000
    sweep_axis: Optional[str] = None
    sweep_values: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.amplitudes is not None:
            object.__setattr__(self, "amplitudes", tuple(complex(a) for a in self.amplitudes))
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


def validate(sys_: BlockSystem) -> List[str]:
    """Return every invariant violation of the system; an empty list means ok."""
    violations: List[str] = []
    omegas = np.asarray(sys_.omegas_A, dtype=float)
    gammas = np.asarray(sys_.gammas_A, dtype=float)
    B, C = sys_.B_block, sys_.C_block

    if sys_.dim_A < 1:
        violations.append("dim_A must be >= 1")
    if len(gammas) != len(omegas):
        violations.append(f"gammas_A has {len(gammas)} entries but omegas_A has {len(omegas)}")
    if not (np.all(np.isfinite(omegas)) and np.all(np.isfinite(gammas))):
        violations.append("omegas_A/gammas_A contain non-finite values")
    negative = [i for i, g in enumerate(gammas) if g < 0]
    if negative:
        violations.append(f"negative decay rate(s) Gamma at A index {negative}")

    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
        violations.append(f"B block must be square with dim_B >= 1, got shape {B.shape}")
    elif not np.all(np.isfinite(B)):
        violations.append("B block contains non-finite entries")
    elif not np.allclose(B, B.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
        dev = float(np.abs(B - B.conj().T).max())
        violations.append(f"B block is not Hermitian (max |B - B^dagger| = {dev:.3e})")

    expected = (len(omegas), B.shape[0] if B.ndim == 2 else -1)
    if C.shape != expected:
        violations.append(f"C block must be dim_A x dim_B = {expected}, got {C.shape}")
    elif not np.all(np.isfinite(C)):
        violations.append("C block contains non-finite entries")
    return violations


def require_valid(sys_: BlockSystem) -> BlockSystem:
    violations = validate(sys_)
    if violations:
        raise ValidationError("invalid block system", violations)
    return sys_


def bare_hamiltonian(sys_: BlockSystem) -> ComplexMatrix:
    """H_0 = diag(A, B)."""
    require_valid(sys_)
    da = sys_.dim_A
    h0 = np.zeros((sys_.dim, sys_.dim), dtype=np.complex128)
    h0[:da, :da] = np.diag(sys_.a_diagonal)
    h0[da:, da:] = sys_.B_block
    return h0


def interaction_hamiltonian(sys_: BlockSystem) -> ComplexMatrix:
    """H_I = [[0, C], [C^dagger, 0]]."""
    require_valid(sys_)
    da = sys_.dim_A
    hi = np.zeros((sys_.dim, sys_.dim), dtype=np.complex128)
    hi[:da, da:] = sys_.C_block
    hi[da:, :da] = sys_.C_block.conj().T
    return hi


def full_hamiltonian(sys_: BlockSystem) -> ComplexMatrix:
    return bare_hamiltonian(sys_) + interaction_hamiltonian(sys_)


def projector_B(sys_: BlockSystem) -> ComplexMatrix:
    return np.diag(np.r_[np.zeros(sys_.dim_A), np.ones(sys_.dim_B)]).astype(np.complex128)


def projector_A(sys_: BlockSystem) -> ComplexMatrix:
    return np.diag(np.r_[np.ones(sys_.dim_A), np.zeros(sys_.dim_B)]).astype(np.complex128)


def a_part(sys_: BlockSystem, psi: ComplexVector) -> ComplexVector:
    return np.asarray(psi)[..., :sys_.dim_A]


def b_part(sys_: BlockSystem, psi: ComplexVector) -> ComplexVector:
    return np.asarray(psi)[..., sys_.dim_A:]


def embed_b(sys_: BlockSystem, psi_b: ComplexVector) -> ComplexVector:
    """Full-space ket with zero A components."""
    out = np.zeros(sys_.dim, dtype=np.complex128)
    out[sys_.dim_A:] = psi_b
    return out


def validate_scenario(sc: Scenario) -> List[str]:
    violations = list(validate(sc.system))
    if sc.amplitudes is None and not 0.0 <= sc.p_A <= 1.0:
        violations.append(f"p_A must lie in [0, 1], got {sc.p_A}")
    if not np.isfinite(sc.theta):
        violations.append("theta must be finite")
    if not sc.t_max > 0:
        violations.append(f"t_max must be > 0, got {sc.t_max}")
    if sc.n_steps < 2:
        violations.append(f"n_steps must be >= 2, got {sc.n_steps}")
    if sc.amplitudes is not None:
        if len(sc.amplitudes) != sc.system.dim:
            violations.append(f"amplitudes has {len(sc.amplitudes)} entries, system dimension is {sc.system.dim}")
        elif np.linalg.norm(np.asarray(sc.amplitudes)) < NORM_TOL:
            violations.append("amplitudes vector is zero")
    elif sc.system.dim_B != 2:
        violations.append("the (p_A, theta) initial state needs dim_B = 2; give explicit amplitudes instead")
    if not sc.delta_t_factor > 0:
        violations.append(f"delta_t_factor must be > 0, got {sc.delta_t_factor}")
    if sc.quadrature_n < 2 or sc.quadrature_n % 2:
        violations.append(f"quadrature_n must be even and >= 2, got {sc.quadrature_n}")
    if sc.sweep_axis is not None:
        values = np.asarray(sc.sweep_values, dtype=float)
        if values.size == 0:
            violations.append("sweep values are empty")
        elif np.any(values <= 0) or np.any(np.diff(values) <= 0):
            violations.append("sweep values must be positive and strictly increasing")
    return violations


def require_valid_scenario(sc: Scenario) -> Scenario:
    violations = validate_scenario(sc)
    if violations:
        raise ValidationError("invalid scenario", violations)
    return sc


def initial_state(sc: Scenario) -> ComplexVector:
    """
    Unit-norm initial ket.

    Preset amplitudes p_A|3> + sqrt(1-p_A)(cos(theta)|2> + sin(theta)|1>)
    are not unit norm for 0 < p_A < 1; the vector is renormalized afterwards.
    Explicit ``amplitudes`` on the scenario take precedence.
    """
    sys_ = sc.system
    if sc.amplitudes is not None:
        if len(sc.amplitudes) != sys_.dim:
            raise ValidationError("initial amplitudes do not match the system dimension",
                                  [f"expected {sys_.dim}, got {len(sc.amplitudes)}"])
        psi = np.asarray(sc.amplitudes, dtype=np.complex128)
    else:
        if not 0.0 <= sc.p_A <= 1.0:
            raise ValidationError("invalid initial state", [f"p_A must lie in [0, 1], got {sc.p_A}"])
        if sys_.dim_B != 2:
            raise ValidationError("invalid initial state", ["(p_A, theta) form needs dim_B = 2"])
        psi = np.zeros(sys_.dim, dtype=np.complex128)
        da = sys_.dim_A
        rest = np.sqrt(1.0 - sc.p_A)
        psi[0] = sc.p_A
        psi[da] = rest * np.sin(sc.theta)      # |1>
        psi[da + 1] = rest * np.cos(sc.theta)  # |2>
    norm = np.linalg.norm(psi)
    if norm < NORM_TOL:
        raise ValidationError("invalid initial state", ["initial state has zero norm"])
    return psi / norm


def require_unit(psi: Sequence[complex], tol: float = 1e-9) -> ComplexVector:
    v = np.asarray(psi, dtype=np.complex128)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValidationError("state must be unit norm", [f"norm = {np.linalg.norm(v):.12g}"])
    return v
