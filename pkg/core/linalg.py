# core/linalg.py
"""
Dense complex linear algebra for the small operators used throughout ZenoSim.

Usage:
    from core.linalg import expm, eig, integrate_matrix
    U = expm(-1j * H * t)
    lam, V = eig(H)
    K = integrate_matrix(lambda s: f(s), 0.0, 1.0, 200)

expm is scaling-and-squaring with Pade approximants of order 3..13
(Higham 2005). It stays accurate for non-normal generators, where going
through an eigendecomposition would not.
"""
from __future__ import annotations
import logging
from typing import Callable, Tuple

import numpy as np
import numpy.typing as npt

from core.errors import DimensionError, NearDefectiveError, NumericalError, ValidationError

logger = logging.getLogger("zenosim.linalg")

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]

MAX_DIM = 64
EIG_RESIDUAL_TOL = 1e-9
# cond(V) above this means the eigenbasis cannot be trusted
EIG_CONDITION_LIMIT = 1e12

_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# largest 1-norm for which each order is accurate to unit roundoff
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068,
    13: 5.371920351148152,
}


def as_square(m, name: str = "matrix") -> ComplexMatrix:
    """Coerce to a finite square complex128 array or raise."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionError(f"{name} must have at least one row")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"{name} has dimension {a.shape[0]} > {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def dagger(m) -> ComplexMatrix:
    return np.asarray(m, dtype=np.complex128).conj().T


def is_hermitian(m, atol: float = 1e-12) -> bool:
    a = np.asarray(m, dtype=np.complex128)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(np.allclose(a, a.conj().T, rtol=0.0, atol=atol))


def one_norm(a: ComplexMatrix) -> float:
    return float(np.max(np.sum(np.abs(a), axis=0)))


def _pade(a: ComplexMatrix, order: int, ident: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    b = _PADE_COEFFS[order]
    a2 = a @ a
    if order == 13:
        a4 = a2 @ a2
        a6 = a2 @ a4
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
        return u, v
    powers = [ident]
    for _ in range(1, (order + 1) // 2):
        powers.append(powers[-1] @ a2)
    u = a @ sum(b[2 * k + 1] * p for k, p in enumerate(powers))
    v = sum(b[2 * k] * p for k, p in enumerate(powers))
    return u, v


def expm(m) -> ComplexMatrix:
    """
    Matrix exponential e^M.

    Raises DimensionError for non-square input and ValidationError for
    non-finite entries. e^0 is returned as the exact identity.
    """
    a = as_square(m, "expm argument")
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    if not a.any():
        return ident

    norm1 = one_norm(a)
    for order in (3, 5, 7, 9):
        if norm1 <= _THETA[order]:
            u, v = _pade(a, order, ident)
            return np.linalg.solve(v - u, v + u)

    scale = max(0, int(np.ceil(np.log2(norm1 / _THETA[13]))))
    u, v = _pade(a / 2.0 ** scale, 13, ident)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(scale):
        r = r @ r
    if not np.all(np.isfinite(r)):
        raise NumericalError(f"expm overflowed (1-norm {norm1:.3e}, {scale} squarings)")
    return r


def eig(m) -> Tuple[ComplexVector, ComplexMatrix]:
    """
    Eigenvalues and unit-norm right eigenvectors (columns) of a square matrix.

    Every pair is checked: ||M v - lambda v|| must stay below
    EIG_RESIDUAL_TOL * max(1, max|M_ij|), and the eigenvector matrix must be
    invertible to working precision, otherwise NearDefectiveError.
    """
    a = as_square(m, "eig argument")
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver did not converge for {a.shape[0]}x{a.shape[0]} matrix "
            f"(max|M_ij| = {np.abs(a).max():.3e}): {exc}") from exc

    v = v / np.linalg.norm(v, axis=0)
    scale = max(1.0, float(np.abs(a).max()))
    residuals = np.linalg.norm(a @ v - v * w, axis=0)
    worst = float(residuals.max())
    if worst > EIG_RESIDUAL_TOL * scale:
        raise NearDefectiveError(f"near-defective matrix: eigen residual {worst:.3e} above floor")
    cond = float(np.linalg.cond(v))
    if not np.isfinite(cond) or cond > EIG_CONDITION_LIMIT:
        raise NearDefectiveError(f"near-defective matrix: eigenvector condition number {cond:.3e}")
    logger.debug("eig: dim=%d worst residual=%.2e cond(V)=%.2e", a.shape[0], worst, cond)
    return w.astype(np.complex128), v.astype(np.complex128)


def simpson_weights(n: int) -> npt.NDArray[np.float64]:
    if n < 2 or n % 2:
        raise ValidationError(f"Simpson rule needs an even subdivision count >= 2, got {n}")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


def integrate_matrix(f: Callable[[float], ComplexMatrix], a: float, b: float, n: int) -> ComplexMatrix:
    """
    Composite Simpson approximation of the integral of f over [a, b],
    entrywise, with n (even) panels.
    """
    if b < a:
        raise ValidationError(f"integration bounds reversed: a={a} > b={b}")
    weights = simpson_weights(n)
    nodes = np.linspace(a, b, n + 1)
    values = np.stack([np.asarray(f(float(s)), dtype=np.complex128) for s in nodes])
    h = (b - a) / n
    return (h / 3.0) * np.tensordot(weights, values, axes=1)
