# core/experiments.py
"""
Scenario runner, decay-rate sweeps and the built-in presets.

Usage:
    from core.experiments import preset, run_scenario, gamma_sweep
    res = run_scenario(preset("fig2a"))
    res.series.minima()["f_ewa"]
    sweep = gamma_sweep(preset("fig4"), threads=4)   # Gamma_3 in {2, 5, 10, 100}
    [row.min_f_zn for row in sweep.summary]

Sweeps rescale every decay rate by the same factor so that the first A
level gets the axis value; ratios such as Gamma_4 / Gamma_3 stay fixed.
"""
from __future__ import annotations
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.dynamics import Trajectory, evolve, evolve_exact, psi_a_bound_series
from core.errors import UnknownPresetError, ValidationError
from core.ewa import EwaConfig, db_ewa, ewa_validity, hb_ewa
from core.fidelity import FidelitySeries, fidelity_series
from core.metrics import Metrics
from core.model import BlockSystem, Scenario, b_part, initial_state, require_valid_scenario
from core.steps import step, step_decorator

logger = logging.getLogger("zenosim.experiments")

GAMMA_AXIS = "gamma"
AXIS_LABELS = {GAMMA_AXIS: "Gamma3_over_eps"}
NORM_MONOTONE_TOL = 1e-9
BOUND_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    scenario: Scenario
    psi0: np.ndarray
    exact: Trajectory
    ewa: Trajectory
    series: FidelitySeries
    psi_a_bound: np.ndarray
    psi_a_bound_conservative: np.ndarray
    d_b: np.ndarray
    validity: Optional[Dict[str, float]]
    elapsed: float

    @property
    def times(self) -> np.ndarray:
        return self.series.times

    @property
    def max_db_entry(self) -> float:
        return float(np.abs(self.d_b).max())

    @property
    def norm_monotone(self) -> bool:
        return bool(np.all(np.diff(self.exact.norms_full) <= NORM_MONOTONE_TOL))

    @property
    def bound_form(self) -> str:
        """'literal' when every omega_n is zero, else 'conservative' (the form valid for detuned levels)."""
        return "literal" if not np.any(np.asarray(self.scenario.system.omegas_A)) else "conservative"

    @property
    def applicable_bound(self) -> np.ndarray:
        return self.psi_a_bound if self.bound_form == "literal" else self.psi_a_bound_conservative

    @property
    def bound_violations(self) -> int:
        return int(np.sum(self.exact.norms_A > self.applicable_bound + BOUND_TOL))


@dataclass(frozen=True)
class SummaryRow:
    axis_value: float
    min_f_ewa: float
    min_f_z: float
    min_f_zn: float
    mean_f_ewa: float
    mean_f_z: float
    mean_f_zn: float
    max_dB_entry: float
    flagged: int


@dataclass(frozen=True, eq=False)
class SweepResult:
    axis_name: str
    axis_values: Tuple[float, ...]
    results: Tuple[ScenarioResult, ...]
    summary: Tuple[SummaryRow, ...]

    def __post_init__(self):
        if len(self.results) != len(self.axis_values) or len(self.summary) != len(self.axis_values):
            raise ValidationError("sweep result is inconsistent", ["one series and one summary row per axis value"])
        if np.any(np.diff(self.axis_values) <= 0):
            raise ValidationError("sweep result is inconsistent", ["axis values must be strictly increasing"])

    @property
    def series(self) -> Tuple[FidelitySeries, ...]:
        return tuple(r.series for r in self.results)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.summary], dtype=float)


def run_scenario(sc: Scenario, metrics: Optional[Metrics] = None) -> ScenarioResult:
    """Exact and EWA trajectories, the three fidelity series and the psi_A bounds on the scenario grid."""
    require_valid_scenario(sc)
    label = sc.label or "scenario"
    sys_ = sc.system
    start = time.perf_counter()
    psi0 = initial_state(sc)
    times = sc.times()

    with step(f"{label}: exact evolution", level="DEBUG"):
        exact = evolve_exact(sys_, psi0, times)
    with step(f"{label}: EWA evolution", level="DEBUG"):
        h_b = hb_ewa(sys_)
        ewa = evolve(h_b.matrix, b_part(sys_, psi0), times)
    with step(f"{label}: fidelities and bounds", level="DEBUG"):
        series = fidelity_series(sys_, psi0, times, exact=exact, ewa=ewa)
        bound = psi_a_bound_series(sys_, psi0, times)
        bound_cons = psi_a_bound_series(sys_, psi0, times, conservative=True)

    validity = None
    if any(g > 0 for g in sys_.gammas_A):
        validity = ewa_validity(sys_, EwaConfig.for_system(sys_, sc.delta_t_factor, sc.quadrature_n))

    result = ScenarioResult(
        scenario=sc,
        psi0=psi0,
        exact=exact,
        ewa=ewa,
        series=series,
        psi_a_bound=bound,
        psi_a_bound_conservative=bound_cons,
        d_b=h_b.d_b,
        validity=validity,
        elapsed=time.perf_counter() - start,
    )
    if not result.norm_monotone:
        logger.warning(f"{label}: exact norm increased by more than {NORM_MONOTONE_TOL:g} along the grid")
    if metrics is not None:
        metrics.incr("scenarios")
        metrics.incr("time_points", len(times))
        metrics.incr("flagged_samples", series.flagged)
    logger.info(f"{label}: min f_ewa={series.minima()['f_ewa']:.6f} min f_zn={series.minima()['f_zn']:.6f} "
                f"({result.elapsed:.3f}s)")
    return result


def summarize(axis_value: float, res: ScenarioResult) -> SummaryRow:
    lo = res.series.minima()
    mean = res.series.means()
    return SummaryRow(
        axis_value=float(axis_value),
        min_f_ewa=lo["f_ewa"],
        min_f_z=lo["f_z"],
        min_f_zn=lo["f_zn"],
        mean_f_ewa=mean["f_ewa"],
        mean_f_z=mean["f_z"],
        mean_f_zn=mean["f_zn"],
        max_dB_entry=res.max_db_entry,
        flagged=res.series.flagged,
    )


def _check_axis(values: Sequence[float]) -> Tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    problems = []
    if not vals:
        problems.append("sweep values are empty")
    elif any(not math.isfinite(v) or v <= 0 for v in vals):
        problems.append("sweep values must be finite and positive")
    elif any(b <= a for a, b in zip(vals, vals[1:])):
        problems.append("sweep values must be strictly increasing")
    if problems:
        raise ValidationError("invalid sweep", problems)
    return vals


def with_gamma(sc: Scenario, gamma: float) -> Scenario:
    """Rescale all decay rates so that Gamma of the first A level equals ``gamma``."""
    base = sc.system.gammas_A
    if base[0] <= 0:
        raise ValidationError("cannot rescale decay rates", ["the first A level has Gamma = 0"])
    factor = float(gamma) / base[0]
    gammas = tuple(float(gamma) if k == 0 else g * factor for k, g in enumerate(base))
    label = f"{sc.label or 'scenario'}@gamma={float(gamma):g}"
    return sc.replace(system=sc.system.replace(gammas_A=gammas), label=label)


def with_omegas(sc: Scenario, omega: float) -> Scenario:
    """Same scenario with every A-level energy set to ``omega``."""
    omegas = tuple(float(omega) for _ in sc.system.omegas_A)
    return sc.replace(system=sc.system.replace(omegas_A=omegas))


def gamma_sweep(sc: Scenario, gammas: Optional[Sequence[float]] = None, threads: int = 1,
                metrics: Optional[Metrics] = None) -> SweepResult:
    """
    run_scenario for each decay rate. Runs are independent; with threads > 1
    they execute on a thread pool and are collected in axis order.
    """
    values = _check_axis(sc.sweep_values if gammas is None else gammas)
    scenarios = [with_gamma(sc, g) for g in values]
    workers = max(1, min(int(threads), len(scenarios)))
    logger.info(f"gamma_sweep: {len(values)} values, {workers} worker(s)")

    def _run(s: Scenario) -> ScenarioResult:
        return run_scenario(s, metrics=metrics)

    if workers == 1:
        results = [_run(s) for s in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, scenarios))

    return SweepResult(
        axis_name=AXIS_LABELS[GAMMA_AXIS],
        axis_values=values,
        results=tuple(results),
        summary=tuple(summarize(v, r) for v, r in zip(values, results)),
    )


@step_decorator("closed-form dressing sweep", level="DEBUG")
def dressing_sweep(sys_: BlockSystem, gammas: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """max |D_B^EWA| for uniform decay rates Gamma_n = gamma; no time evolution."""
    values = np.asarray(_check_axis(gammas))
    entries = np.array([
        np.abs(db_ewa(sys_.replace(gammas_A=tuple(g for _ in sys_.gammas_A)))).max() for g in values
    ])
    return values, entries


def zeno_scaling_slope(sweep) -> float:
    """
    Least-squares slope of log max|D_B^EWA| against log Gamma. Accepts a
    SweepResult or an (axis values, max entries) pair as returned by
    dressing_sweep.
    """
    if isinstance(sweep, SweepResult):
        x, y = np.asarray(sweep.axis_values), sweep.column("max_dB_entry")
    else:
        x, y = (np.asarray(v, dtype=float) for v in sweep)
    if x.size < 2 or np.any(y <= 0):
        raise ValidationError("scaling fit needs at least two points with nonzero dressing")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


# built-in presets; energies in units of epsilon, omega_3 = omega_4 = 0

FIG2_SWEEP = (0.1, 1.0, 3.0, 5.0)
FIG4_SWEEP = (2.0, 5.0, 10.0, 100.0)


def _b_block(g: float) -> List[List[float]]:
    return [[0.0, g], [g, 1.0]]


def _fig2(g: float, p_a: float, theta: float, name: str) -> Scenario:
    sys_ = BlockSystem(omegas_A=(0.0,), gammas_A=(5.0,), B_block=_b_block(g), C_block=[[0.5, 0.5]])
    return Scenario(system=sys_, p_A=p_a, theta=theta, label=name,
                    sweep_axis=GAMMA_AXIS, sweep_values=FIG2_SWEEP)


def _fig3(p_a: float, theta: float, name: str) -> Scenario:
    sys_ = BlockSystem(omegas_A=(0.0, 0.0), gammas_A=(5.0, 6.0), B_block=_b_block(0.5),
                       C_block=[[0.5, 0.5], [0.4, 0.4]])
    return Scenario(system=sys_, p_A=p_a, theta=theta, label=name,
                    sweep_axis=GAMMA_AXIS, sweep_values=FIG2_SWEEP)


def _fig4(name: str) -> Scenario:
    sys_ = BlockSystem(omegas_A=(0.0, 0.0), gammas_A=(100.0, 0.0), B_block=_b_block(0.5),
                       C_block=[[0.5, 0.5], [0.0, 0.0]])
    return Scenario(system=sys_, p_A=0.0, theta=0.0, label=name,
                    sweep_axis=GAMMA_AXIS, sweep_values=FIG4_SWEEP)


PRESETS: Dict[str, Callable[[], Scenario]] = {
    "fig2a": lambda: _fig2(0.5, 0.0, 0.0, "fig2a"),
    "fig2b": lambda: _fig2(0.5, 0.0, math.pi / 4, "fig2b"),
    "fig2c": lambda: _fig2(0.25, 0.0, 0.0, "fig2c"),
    "fig2d": lambda: _fig2(0.25, 0.25, math.pi / 4, "fig2d"),
    "fig3a": lambda: _fig3(0.0, 0.0, "fig3a"),
    "fig3b": lambda: _fig3(0.1, math.pi / 3, "fig3b"),
    "fig4": lambda: _fig4("fig4"),
}


def preset(name: str) -> Scenario:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(name, PRESETS) from None
    return factory()
