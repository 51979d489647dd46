# zeno/utils/oracles.py
"""
Independent reference computations used by the tests: a scaled Taylor
series for e^M and a fixed-step RK4 integrator for d psi/dt = -i H psi.
Neither shares code with core.linalg or core.dynamics.
"""
from __future__ import annotations

import numpy as np


def taylor_expm(m: np.ndarray, order: int = 30) -> np.ndarray:
    """Scale until ||M / 2^s||_1 <= 0.5, sum the series, square back s times."""
    norm = np.abs(m).sum(axis=0).max()
    s = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0 else 0
    a = m / 2.0 ** s
    out = np.eye(m.shape[0], dtype=np.complex128)
    term = out.copy()
    for k in range(1, order + 1):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def rk4_propagate(h: np.ndarray, psi0: np.ndarray, t_end: float, step: float) -> np.ndarray:
    f = lambda y: -1j * (h @ y)
    y = np.asarray(psi0, dtype=np.complex128)
    for _ in range(int(round(t_end / step))):
        k1 = f(y)
        k2 = f(y + 0.5 * step * k1)
        k3 = f(y + 0.5 * step * k2)
        k4 = f(y + step * k3)
        y = y + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y
