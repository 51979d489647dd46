# core/lindblad.py
"""
Master-equation witness for the non-Hermitian reduction.

The system lives on A + B + G (basis order A, B, G). Decays run one way,
from A into G, through jump operators X = Pi_G X Pi_A. Projected onto A + B,
the master equation closes on

    d rho/dt = -i (H rho - rho H^dagger),   H = Pi_AB H_S Pi_AB - i sum gamma/2 X^dagger X + H_I

so integrating the full Lindblad equation and projecting must agree with
e^{-iHt} rho(0) e^{iH^dagger t}.

Usage:
    from core.lindblad import model_from_block_system, equivalence_check
    model = model_from_block_system(sys_)
    dist = equivalence_check(model, interaction_hamiltonian(sys_), rho0_ab, times)
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.dynamics import check_times, propagators
from core.errors import DimensionError, IntegratorStepError, ValidationError
from core.linalg import ComplexMatrix, as_square, is_hermitian
from core.model import BlockSystem, require_valid
from core.steps import step_decorator

logger = logging.getLogger("zenosim.lindblad")

HERMITIAN_TOL = 1e-12
DENSITY_HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-9
TRACE_TOL = 1e-10
MAX_STEP = 1e-3
HALVING_TOL = 1e-9
MAX_HALVINGS = 6

Jump = Tuple[ComplexMatrix, float]


@dataclass(frozen=True, eq=False)
class LindbladModel:
    dim_A: int
    dim_B: int
    dim_G: int
    H_S: ComplexMatrix
    jumps: Tuple[Jump, ...] = field(default_factory=tuple)

    def __post_init__(self):
        h = np.array(self.H_S, dtype=np.complex128)
        h.setflags(write=False)
        object.__setattr__(self, "H_S", h)
        frozen = []
        for x, rate in self.jumps:
            arr = np.array(x, dtype=np.complex128)
            arr.setflags(write=False)
            frozen.append((arr, float(rate)))
        object.__setattr__(self, "jumps", tuple(frozen))
        violations = validate_model(self)
        if violations:
            raise ValidationError("invalid Lindblad model", violations)

    @property
    def dim(self) -> int:
        return self.dim_A + self.dim_B + self.dim_G

    @property
    def dim_AB(self) -> int:
        return self.dim_A + self.dim_B

    def coupled(self, H_I_AB) -> "LindbladModel":
        """Same jumps, with the A + B interaction added to H_S."""
        h_i = _check_interaction(self, H_I_AB)
        h = np.array(self.H_S)
        h[:self.dim_AB, :self.dim_AB] += h_i
        return LindbladModel(self.dim_A, self.dim_B, self.dim_G, h, self.jumps)


def validate_model(model: LindbladModel) -> List[str]:
    violations: List[str] = []
    if min(model.dim_A, model.dim_B) < 1 or model.dim_G < 0:
        violations.append(f"dimensions must satisfy dim_A, dim_B >= 1, dim_G >= 0; got "
                          f"({model.dim_A}, {model.dim_B}, {model.dim_G})")
        return violations
    n = model.dim
    if model.H_S.shape != (n, n):
        violations.append(f"H_S must be {n}x{n}, got {model.H_S.shape}")
    elif not np.all(np.isfinite(model.H_S)):
        violations.append("H_S contains non-finite entries")
    elif not is_hermitian(model.H_S, atol=HERMITIAN_TOL):
        violations.append("H_S is not Hermitian")

    a_cols = slice(0, model.dim_A)
    g_rows = slice(model.dim_AB, n)
    for k, (x, rate) in enumerate(model.jumps):
        if x.shape != (n, n):
            violations.append(f"jump {k} must be {n}x{n}, got {x.shape}")
            continue
        if not np.isfinite(rate) or rate < 0:
            violations.append(f"jump {k} has invalid rate {rate}")
        outside = x.copy()
        outside[g_rows, a_cols] = 0.0
        if np.any(outside != 0):
            violations.append(f"jump {k} is not of the form Pi_G X Pi_A")
    return violations


def _check_interaction(model: LindbladModel, H_I_AB) -> ComplexMatrix:
    h_i = as_square(H_I_AB, "H_I")
    if h_i.shape != (model.dim_AB, model.dim_AB):
        raise DimensionError(f"H_I must act on A + B ({model.dim_AB}x{model.dim_AB}), got {h_i.shape}")
    if not is_hermitian(h_i, atol=HERMITIAN_TOL):
        raise ValidationError("H_I must be Hermitian")
    return h_i


def check_density(rho, dim: Optional[int] = None) -> ComplexMatrix:
    """Validate a density matrix and return it Hermitian-symmetrized."""
    r = np.asarray(rho, dtype=np.complex128)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {r.shape}")
    if dim is not None and r.shape[0] != dim:
        raise DimensionError(f"density matrix is {r.shape[0]}x{r.shape[0]}, expected {dim}x{dim}")
    problems = []
    if not np.all(np.isfinite(r)):
        raise ValidationError("invalid density matrix", ["non-finite entries"])
    dev = float(np.abs(r - r.conj().T).max())
    if dev > DENSITY_HERMITIAN_TOL:
        problems.append(f"not Hermitian (max deviation {dev:.3e})")
    herm = 0.5 * (r + r.conj().T)
    low = float(np.linalg.eigvalsh(herm).min())
    if low < -POSITIVITY_TOL:
        problems.append(f"not positive semidefinite (min eigenvalue {low:.3e})")
    tr = float(np.real(np.trace(herm)))
    if tr > 1.0 + TRACE_TOL:
        problems.append(f"trace {tr:.12g} exceeds 1")
    if problems:
        raise ValidationError("invalid density matrix", problems)
    return herm


def lindblad_rhs(model: LindbladModel, rho) -> ComplexMatrix:
    """-i[H_S, rho] + sum gamma (X rho X^dagger - 1/2 {X^dagger X, rho})."""
    r = np.asarray(rho, dtype=np.complex128)
    if r.shape != (model.dim, model.dim):
        raise DimensionError(f"rho is {r.shape}, model dimension is {model.dim}")
    h = model.H_S
    out = -1j * (h @ r - r @ h)
    for x, rate in model.jumps:
        if rate == 0.0:
            continue
        xd = x.conj().T
        xdx = xd @ x
        out += rate * (x @ r @ xd - 0.5 * (xdx @ r + r @ xdx))
    return out


def superoperator(model: LindbladModel) -> ComplexMatrix:
    """Generator L acting on row-major vec(rho): vec(A rho B) = (A kron B^T) vec(rho)."""
    n = model.dim
    ident = np.eye(n, dtype=np.complex128)
    h = model.H_S
    sup = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    for x, rate in model.jumps:
        if rate == 0.0:
            continue
        xdx = x.conj().T @ x
        sup += rate * (np.kron(x, x.conj()) - 0.5 * np.kron(xdx, ident) - 0.5 * np.kron(ident, xdx.T))
    return sup


def rk4_step_matrix(generator: ComplexMatrix, h: float) -> ComplexMatrix:
    """One classical RK4 step for dy/dt = L y with constant L: the degree-4 Taylor polynomial of hL."""
    hl = h * generator
    ident = np.eye(generator.shape[0], dtype=np.complex128)
    out = ident.copy()
    term = ident
    for k in range(1, 5):
        term = term @ hl / k
        out = out + term
    return out


def _run_rk4(generator: ComplexMatrix, rho0: ComplexMatrix, times: np.ndarray, max_step: float) -> np.ndarray:
    n = rho0.shape[0]
    vec = rho0.reshape(-1).copy()
    out = np.empty((times.size, n, n), dtype=np.complex128)
    out[0] = rho0
    cache: Dict[float, ComplexMatrix] = {}
    for k, dt in enumerate(np.diff(times), start=1):
        key = float(f"{dt:.12g}")
        if key not in cache:
            n_sub = max(1, int(np.ceil(key / max_step - 1e-9)))
            cache[key] = np.linalg.matrix_power(rk4_step_matrix(generator, key / n_sub), n_sub)
        vec = cache[key] @ vec
        out[k] = vec.reshape(n, n)
    return out


def trace_distance(rho1, rho2) -> float:
    """1/2 ||rho1 - rho2||_1 from the eigenvalues of the Hermitian difference."""
    d = np.asarray(rho1, dtype=np.complex128) - np.asarray(rho2, dtype=np.complex128)
    d = 0.5 * (d + d.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(d))))


def _max_distance(run1: np.ndarray, run2: np.ndarray) -> float:
    return max(trace_distance(a, b) for a, b in zip(run1, run2))


def _check_outputs(states: np.ndarray, trace0: float) -> None:
    for k, r in enumerate(states):
        herm = 0.5 * (r + r.conj().T)
        low = float(np.linalg.eigvalsh(herm).min())
        if low < -POSITIVITY_TOL:
            raise IntegratorStepError(f"positivity lost at output {k}: min eigenvalue {low:.3e}")
        drift = abs(float(np.real(np.trace(r))) - trace0)
        if drift > TRACE_TOL:
            raise IntegratorStepError(f"trace drift {drift:.3e} at output {k}")


def integrate(model: LindbladModel, rho0, times: Sequence[float], max_step: float = MAX_STEP,
              tol: float = HALVING_TOL) -> np.ndarray:
    """
    Classical RK4 with fixed substeps <= max_step between output times. The
    step is halved until two successive runs agree to ``tol`` in trace
    distance at every output; the finer run is returned, shape (T, dim, dim).
    """
    if not max_step > 0:
        raise ValidationError(f"max_step must be > 0, got {max_step}")
    r0 = check_density(rho0, model.dim)
    t = check_times(times)
    generator = superoperator(model)
    trace0 = float(np.real(np.trace(r0)))

    h = max_step
    previous = _run_rk4(generator, r0, t, h)
    for halving in range(1, MAX_HALVINGS + 1):
        h /= 2.0
        current = _run_rk4(generator, r0, t, h)
        dist = _max_distance(previous, current)
        logger.debug("integrate: halving %d, step %.3e, max trace distance %.3e", halving, h, dist)
        if dist <= tol:
            _check_outputs(current, trace0)
            return current
        previous = current
    raise IntegratorStepError(
        f"RK4 did not settle after {MAX_HALVINGS} halvings (last change {dist:.3e} > {tol:.1e}, step {h:.3e})")


def reduced_nhh(model: LindbladModel, H_I_AB, gamma_scale: float = 1.0) -> ComplexMatrix:
    """
    Non-Hermitian Hamiltonian on A + B:

        Pi_AB H_S Pi_AB - i sum gamma/2 X^dagger X + H_I

    ``gamma_scale`` multiplies every rate in the dissipative term only.
    """
    h_i = _check_interaction(model, H_I_AB)
    ab = model.dim_AB
    h = np.array(model.H_S[:ab, :ab], dtype=np.complex128)
    for x, rate in model.jumps:
        xdx = x.conj().T @ x
        h -= 0.5j * gamma_scale * rate * xdx[:ab, :ab]
    return h + h_i


def nhh_density_evolve(H, rho0, times: Sequence[float]) -> np.ndarray:
    """rho(t) = e^{-iHt} rho(0) e^{iH^dagger t}, shape (T, dim, dim)."""
    h = as_square(H, "Hamiltonian")
    r0 = np.asarray(rho0, dtype=np.complex128)
    if r0.shape != h.shape:
        raise DimensionError(f"rho0 is {r0.shape}, Hamiltonian is {h.shape}")
    t = check_times(times)
    return np.stack([u @ r0 @ u.conj().T for u in propagators(h, t)])


def embed_ab(model: LindbladModel, rho_ab) -> ComplexMatrix:
    """Pad an A + B density matrix with zero G rows and columns."""
    r = np.asarray(rho_ab, dtype=np.complex128)
    out = np.zeros((model.dim, model.dim), dtype=np.complex128)
    out[:model.dim_AB, :model.dim_AB] = r
    return out


def _support_on_ab(model: LindbladModel, rho0) -> Tuple[ComplexMatrix, ComplexMatrix]:
    r = np.asarray(rho0, dtype=np.complex128)
    ab = model.dim_AB
    if r.shape == (ab, ab):
        return r, embed_ab(model, r)
    if r.shape == (model.dim, model.dim):
        leak = max(float(np.abs(r[ab:, :]).max(initial=0.0)), float(np.abs(r[:, ab:]).max(initial=0.0)))
        if leak > HERMITIAN_TOL:
            raise ValidationError("initial state must be supported on A + B",
                                  [f"G components up to {leak:.3e}"])
        return r[:ab, :ab], r
    raise DimensionError(f"rho0 must be {ab}x{ab} or {model.dim}x{model.dim}, got {r.shape}")


@step_decorator("master-equation equivalence", level="DEBUG")
def equivalence_distances(model: LindbladModel, H_I_AB, rho0_AB, times: Sequence[float],
                          gamma_scale: float = 1.0, max_step: float = MAX_STEP) -> np.ndarray:
    """Trace distance per time between the projected master equation and the NHH evolution."""
    r_ab, r_full = _support_on_ab(model, rho0_AB)
    check_density(r_full, model.dim)
    t = check_times(times)
    ab = model.dim_AB

    full = integrate(model.coupled(H_I_AB), r_full, t, max_step=max_step)
    reduced = nhh_density_evolve(reduced_nhh(model, H_I_AB, gamma_scale=gamma_scale), r_ab, t)
    return np.array([trace_distance(f[:ab, :ab], r) for f, r in zip(full, reduced)])


def equivalence_check(model: LindbladModel, H_I_AB, rho0_AB, times: Sequence[float],
                      gamma_scale: float = 1.0, max_step: float = MAX_STEP) -> float:
    dist = equivalence_distances(model, H_I_AB, rho0_AB, times, gamma_scale=gamma_scale, max_step=max_step)
    worst = float(dist.max())
    logger.info("equivalence_check: max trace distance %.3e over %d times", worst, dist.size)
    return worst


def model_from_block_system(sys_: BlockSystem, dim_G: Optional[int] = None) -> LindbladModel:
    """
    Smallest model whose reduction gives back ``sys_``: one G level per A
    level, jump |g_n><a_n| at rate 2 Gamma_n. H_S carries the Hermitian bare
    part only; pass the interaction separately (or use ``coupled``).
    """
    require_valid(sys_)
    dim_g = sys_.dim_A if dim_G is None else int(dim_G)
    if dim_g < sys_.dim_A:
        raise ValidationError("not enough G levels", [f"dim_G = {dim_g} < dim_A = {sys_.dim_A}"])
    n = sys_.dim + dim_g
    h_s = np.zeros((n, n), dtype=np.complex128)
    h_s[:sys_.dim_A, :sys_.dim_A] = np.diag(sys_.omegas_A)
    h_s[sys_.dim_A:sys_.dim, sys_.dim_A:sys_.dim] = sys_.B_block

    jumps = []
    for k, gamma in enumerate(sys_.gammas_A):
        x = np.zeros((n, n), dtype=np.complex128)
        x[sys_.dim + k, k] = 1.0
        jumps.append((x, 2.0 * gamma))
    return LindbladModel(sys_.dim_A, sys_.dim_B, dim_g, h_s, tuple(jumps))


def populations(rho, model: LindbladModel) -> Dict[str, np.ndarray]:
    """Total population of each subspace; accepts one matrix or a (T, dim, dim) stack."""
    r = np.asarray(rho)
    diag = np.real(np.diagonal(r, axis1=-2, axis2=-1))
    a, ab = model.dim_A, model.dim_AB
    return {
        "A": diag[..., :a].sum(axis=-1),
        "B": diag[..., a:ab].sum(axis=-1),
        "G": diag[..., ab:].sum(axis=-1),
    }
