import logging

import numpy as np
import pytest

from core.errors import UnknownPresetError, ValidationError
from core.experiments import (
    AXIS_LABELS, FIG2_SWEEP, FIG4_SWEEP, GAMMA_AXIS, PRESETS, SummaryRow, SweepResult, dressing_sweep, gamma_sweep,
    preset, run_scenario, summarize, with_gamma, with_omegas, zeno_scaling_slope,
)
from core.metrics import Metrics
from core.model import BlockSystem, Scenario


def short(sc: Scenario, n_steps: int = 40, t_max: float = 4.0) -> Scenario:
    return sc.replace(n_steps=n_steps, t_max=t_max)


@pytest.mark.smoke
def test_presets_are_valid_scenarios():
    assert set(PRESETS) == {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4"}
    for name in PRESETS:
        sc = preset(name)
        assert sc.label == name
        assert sc.sweep_axis == GAMMA_AXIS
        assert sc.times().size == 401


def test_preset_parameters():
    fig3 = preset("fig3a").system
    assert fig3.gammas_A[1] / fig3.gammas_A[0] == pytest.approx(1.2)
    assert np.allclose(fig3.C_block[1], [0.4, 0.4])
    assert preset("fig2c").system.B_block[0, 1] == 0.25
    assert preset("fig4").sweep_values == FIG4_SWEEP
    assert preset("fig2a").sweep_values == FIG2_SWEEP


def test_unknown_preset():
    with pytest.raises(UnknownPresetError) as exc:
        preset("fig9")
    assert "fig2a" in str(exc.value)


@pytest.mark.smoke
def test_run_scenario_shapes_and_counters():
    metrics = Metrics()
    res = run_scenario(short(preset("fig2a")), metrics=metrics)
    assert len(res.times) == 41
    assert res.exact.states.shape == (41, 3)
    assert res.ewa.states.shape == (41, 2)
    assert res.psi_a_bound.shape == (41,)
    assert np.all(res.psi_a_bound_conservative >= res.psi_a_bound)
    assert res.norm_monotone
    assert res.validity is not None and res.validity["gamma_min"] == 5.0
    assert res.max_db_entry == pytest.approx(0.05)
    assert metrics.get_counter("scenarios") == 1
    assert metrics.get_counter("time_points") == 41
    assert metrics.get_counter("flagged_samples") == 0


def test_run_scenario_without_decay_skips_validity():
    sc = short(preset("fig2a"))
    sc = sc.replace(system=sc.system.replace(gammas_A=(0.0,), C_block=[[0.0, 0.0]]))
    res = run_scenario(sc)
    assert res.validity is None


def test_run_scenario_rejects_invalid():
    with pytest.raises(ValidationError):
        run_scenario(preset("fig2a").replace(n_steps=1))


def test_summarize():
    res = run_scenario(short(preset("fig2b")))
    row = summarize(5.0, res)
    assert isinstance(row, SummaryRow)
    assert row.axis_value == 5.0
    assert row.min_f_ewa == pytest.approx(np.min(res.series.f_ewa))
    assert row.mean_f_z == pytest.approx(np.mean(res.series.f_z))
    assert row.flagged == 0


def test_with_gamma_keeps_ratios():
    sc = with_gamma(preset("fig3a"), 3.0)
    assert sc.system.gammas_A == pytest.approx((3.0, 3.6))
    assert sc.label == "fig3a@gamma=3"
    fig4 = with_gamma(preset("fig4"), 2.0)
    assert fig4.system.gammas_A == (2.0, 0.0)
    with pytest.raises(ValidationError):
        with_gamma(preset("fig2a").replace(system=preset("fig2a").system.replace(gammas_A=(0.0,))), 1.0)


def test_with_omegas():
    sc = with_omegas(preset("fig3a"), 0.7)
    assert sc.system.omegas_A == (0.7, 0.7)
    assert sc.system.gammas_A == preset("fig3a").system.gammas_A


def test_gamma_sweep_order_and_threads():
    sc = short(preset("fig4"))
    serial = gamma_sweep(sc)
    threaded = gamma_sweep(sc, threads=4)
    assert serial.axis_name == AXIS_LABELS[GAMMA_AXIS]
    assert serial.axis_values == FIG4_SWEEP
    assert [r.scenario.system.gammas_A[0] for r in threaded.results] == list(FIG4_SWEEP)
    assert np.array_equal(serial.column("min_f_zn"), threaded.column("min_f_zn"))
    assert len(serial.series) == 4


def test_gamma_sweep_explicit_values_and_errors():
    sc = short(preset("fig2a"))
    sweep = gamma_sweep(sc, gammas=[1.0, 2.0])
    assert sweep.axis_values == (1.0, 2.0)
    with pytest.raises(ValidationError):
        gamma_sweep(sc, gammas=[])
    with pytest.raises(ValidationError):
        gamma_sweep(sc, gammas=[2.0, 1.0])
    with pytest.raises(ValidationError):
        gamma_sweep(sc, gammas=[0.0, 1.0])


def test_gamma_sweep_counts_metrics():
    metrics = Metrics()
    gamma_sweep(short(preset("fig2a")), gammas=[1.0, 2.0, 3.0], threads=3, metrics=metrics)
    assert metrics.get_counter("scenarios") == 3
    assert metrics.get_counter("time_points") == 3 * 41


def test_sweep_result_consistency():
    res = run_scenario(short(preset("fig2a")))
    row = summarize(1.0, res)
    with pytest.raises(ValidationError):
        SweepResult(axis_name="g", axis_values=(1.0, 2.0), results=(res,), summary=(row,))
    with pytest.raises(ValidationError):
        SweepResult(axis_name="g", axis_values=(2.0, 1.0), results=(res, res), summary=(row, row))


def test_dressing_shrinks_with_decay_rate():
    sys_ = preset("fig2a").system
    values, entries = dressing_sweep(sys_, [10.0, 100.0, 1000.0, 10000.0])
    assert np.all(np.diff(entries) < 0)
    assert zeno_scaling_slope((values, entries)) == pytest.approx(-1.0, abs=0.05)


def test_scaling_slope_of_exact_power_law():
    x = np.array([1.0, 10.0, 100.0])
    assert zeno_scaling_slope((x, 3.0 / x)) == pytest.approx(-1.0)
    with pytest.raises(ValidationError):
        zeno_scaling_slope(([1.0], [1.0]))
    with pytest.raises(ValidationError):
        zeno_scaling_slope((x, np.zeros(3)))


def test_scaling_slope_from_sweep_result():
    sweep = gamma_sweep(short(preset("fig2a")), gammas=[10.0, 100.0, 1000.0])
    assert zeno_scaling_slope(sweep) == pytest.approx(-1.0, abs=0.05)


def test_dressing_sweep_sets_every_rate():
    sys_ = BlockSystem(omegas_A=(0.0, 0.0), gammas_A=(5.0, 6.0), B_block=np.diag([0.0, 1.0]),
                       C_block=[[0.5, 0.5], [0.4, 0.4]])
    _, entries = dressing_sweep(sys_, [10.0])
    assert entries[0] == pytest.approx((0.25 + 0.16) / 10.0)


def test_bound_form_follows_detuning():
    res = run_scenario(short(preset("fig2a")))
    assert res.bound_form == "literal"
    assert res.applicable_bound is res.psi_a_bound
    assert res.bound_violations == 0

    detuned = run_scenario(short(with_omegas(preset("fig3a"), 0.7)))
    assert detuned.bound_form == "conservative"
    assert detuned.applicable_bound is detuned.psi_a_bound_conservative
    assert detuned.bound_violations == 0


def test_dressing_sweep_runs_as_logged_step(caplog):
    with caplog.at_level(logging.DEBUG, logger="zenosim.steps"):
        dressing_sweep(preset("fig2a").system, [10.0, 100.0])
    messages = [r.getMessage() for r in caplog.records]
    assert any(m.startswith("STEP START: closed-form dressing sweep") for m in messages)
    assert any(m.startswith("STEP END  : closed-form dressing sweep") for m in messages)


def test_run_counters_are_the_documented_ones():
    metrics = Metrics()
    run_scenario(short(preset("fig2b")), metrics=metrics)
    assert set(metrics.to_dict()["counters"]) == {"scenarios", "time_points", "flagged_samples"}
