#!/usr/bin/env python3
"""
ZenoSim command-line runner.

    python -m zeno.runner simulate --preset fig2a --out out/fig2a.csv
    python -m zeno.runner sweep --scenario zeno/config/scenarios/fig4.json --out out/fig4.csv --threads 4
    python -m zeno.runner validate --preset fig2a
    python -m zeno.runner bound --preset fig3b --out out/fig3b_bound.csv
    python -m zeno.runner presets [--write]

- Every run writes <out_stem>.manifest.json next to its output (scenario, timings, status)
- JSON-lines log under <log-dir>/<TS>/run.log
- Exit codes: 0 ok, 1 validate above tolerance or bound exceeded, 2 unreadable scenario, 3 invalid input, 4 numerical failure
"""
from __future__ import annotations
import argparse
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from core import config_loader, reporter
from core.errors import DimensionError, NumericalError, ScenarioParseError, UnknownPresetError, ValidationError
from core.experiments import PRESETS, gamma_sweep, preset, run_scenario
from core.lindblad import equivalence_distances, model_from_block_system
from core.logger import enable_verbose_console, get_logger
from core.metrics import Metrics
from core.model import Scenario, initial_state, interaction_hamiltonian

THIS_FILE = Path(__file__).resolve()
ZENO_ROOT = THIS_FILE.parent
PROJECT_ROOT = ZENO_ROOT.parent
PRESET_DIR = ZENO_ROOT / "config" / "scenarios"

TS_FMT = "%Y%m%d_%H%M%S_%f"
EQUIVALENCE_TOL = 1e-6

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_NUMERICAL = 4


def _quiet_print(*a, **kw):
    print(*a, **kw)


def _env_int(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, default))
    except ValueError:
        return default


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenosim", description="EWA effective Hamiltonians and Zeno sweeps")
    parser.add_argument("--log-level", default=os.getenv("ZENOSIM_LOG_LEVEL", "INFO"))
    parser.add_argument("--log-dir", default=os.getenv("ZENOSIM_LOG_DIR", str(PROJECT_ROOT / "logs")))
    parser.add_argument("--verbose", action="store_true", help="Show engine debug steps on the console")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p: argparse.ArgumentParser, needs_out: bool = True):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--scenario", type=Path, help="Scenario JSON file")
        src.add_argument("--preset", type=str, help=f"Built-in scenario: {', '.join(PRESETS)}")
        p.add_argument("--out", type=Path, required=needs_out, help="Output path")
        p.add_argument("--format", choices=reporter.FORMATS, default="csv")

    scenario_args(sub.add_parser("simulate", help="Fidelity and norm series for one scenario"))
    p_sweep = sub.add_parser("sweep", help="Decay-rate sweep: one series per value plus a summary")
    scenario_args(p_sweep)
    p_sweep.add_argument("--threads", type=int, default=_env_int("ZENOSIM_THREADS", 1))
    p_val = sub.add_parser("validate", help="Master-equation equivalence check")
    scenario_args(p_val, needs_out=False)
    p_val.add_argument("--gamma-scale", type=float, default=1.0,
                       help="Scale the decay rates of the reduced Hamiltonian (1 = faithful)")
    p_val.add_argument("--tolerance", type=float, default=EQUIVALENCE_TOL)
    scenario_args(sub.add_parser("bound", help="psi_A bound against the exact ||psi_A(t)||"))
    p_pre = sub.add_parser("presets", help="List built-in presets")
    p_pre.add_argument("--write", action="store_true", help=f"Regenerate the preset files under {PRESET_DIR}")
    return parser


def _load(args) -> Scenario:
    if args.preset:
        return preset(args.preset)
    return config_loader.load_scenario(args.scenario)


def _manifest_path(out: Path) -> Path:
    return out.with_name(f"{out.stem}.manifest.json")


def _series_path(out: Path, axis: str, value: float) -> Path:
    return out.with_name(f"{out.stem}_{axis}_{value:g}{out.suffix}")


def cmd_simulate(args, logger, metrics: Metrics, manifest: Dict[str, Any]) -> int:
    sc = _load(args)
    manifest["scenario"] = config_loader.scenario_to_dict(sc)
    with metrics.timed("simulate"):
        res = run_scenario(sc, metrics=metrics)
    path = reporter.write_series(res, args.out, args.format)
    manifest["outputs"] = [str(path)]
    manifest["minima"] = res.series.minima()
    _quiet_print(f"{sc.label or 'scenario'}: {len(res.times)} rows -> {path}")
    return EXIT_OK


def cmd_sweep(args, logger, metrics: Metrics, manifest: Dict[str, Any]) -> int:
    sc = _load(args)
    manifest["scenario"] = config_loader.scenario_to_dict(sc)
    if sc.sweep_axis is None:
        raise ValidationError("scenario has no sweep section", ["add sweep {axis, values}"])
    with metrics.timed("sweep"):
        sweep = gamma_sweep(sc, threads=args.threads, metrics=metrics)
    outputs = []
    for value, res in zip(sweep.axis_values, sweep.results):
        outputs.append(str(reporter.write_series(res, _series_path(args.out, sc.sweep_axis, value), args.format)))
    summary = reporter.write_summary(sweep, args.out, args.format)
    outputs.append(str(summary))
    manifest["outputs"] = outputs
    _quiet_print(f"sweep over {sweep.axis_name}: {len(sweep.axis_values)} series, summary -> {summary}")
    return EXIT_OK


def cmd_validate(args, logger, metrics: Metrics, manifest: Dict[str, Any]) -> int:
    sc = _load(args)
    manifest["scenario"] = config_loader.scenario_to_dict(sc)
    sys_ = sc.system
    psi0 = initial_state(sc)
    rho0 = np.outer(psi0, psi0.conj())
    times = sc.times()
    model = model_from_block_system(sys_)
    with metrics.timed("validate"):
        dist = equivalence_distances(model, interaction_hamiltonian(sys_), rho0, times,
                                     gamma_scale=args.gamma_scale)
    worst = float(dist.max())
    passed = worst <= args.tolerance
    manifest["max_trace_distance"] = worst
    manifest["gamma_scale"] = args.gamma_scale
    if args.out:
        frame = pd.DataFrame({"t": times, "trace_distance": dist})
        manifest["outputs"] = [str(reporter.write_frame(frame, args.out, args.format))]
    _quiet_print(f"max trace distance: {worst:.6e} ({'ok' if passed else 'above'} tolerance {args.tolerance:g})")
    return EXIT_OK if passed else EXIT_THRESHOLD


def cmd_bound(args, logger, metrics: Metrics, manifest: Dict[str, Any]) -> int:
    sc = _load(args)
    manifest["scenario"] = config_loader.scenario_to_dict(sc)
    with metrics.timed("bound"):
        res = run_scenario(sc, metrics=metrics)
    path = reporter.write_bound(res, args.out, args.format)
    violated = res.bound_violations
    manifest["outputs"] = [str(path)]
    manifest["bound_form"] = res.bound_form
    manifest["bound_violations"] = violated
    _quiet_print(f"bound: {len(res.times)} rows -> {path} ({violated} samples above the {res.bound_form} bound)")
    return EXIT_OK if violated == 0 else EXIT_THRESHOLD


def cmd_presets(args, logger, metrics: Metrics, manifest: Dict[str, Any]) -> int:
    for name in PRESETS:
        sc = preset(name)
        _quiet_print(f"{name}: dim_A={sc.system.dim_A} gammas={sc.system.gammas_A} p_A={sc.p_A} "
                     f"theta={sc.theta:.6g} sweep={sc.sweep_values}")
        if args.write:
            config_loader.dump_scenario(sc, PRESET_DIR / f"{name}.json")
    if args.write:
        logger.info(f"preset files written to {PRESET_DIR}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "bound": cmd_bound,
    "presets": cmd_presets,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    ts = datetime.now().strftime(TS_FMT)
    logger = get_logger(Path(args.log_dir), ts, level=args.log_level)
    if args.verbose:
        enable_verbose_console(logger, level="DEBUG", show_module=True)

    metrics = Metrics()
    manifest: Dict[str, Any] = {"command": args.command, "timestamp": ts, "status": "not_started"}
    try:
        code = COMMANDS[args.command](args, logger, metrics, manifest)
        manifest["status"] = "passed" if code == EXIT_OK else "failed"
    except (ScenarioParseError, FileNotFoundError, UnknownPresetError) as e:
        logger.error(f"Scenario error: {e}")
        manifest.update(status="error", error=str(e))
        code = EXIT_PARSE
    except (ValidationError, DimensionError) as e:
        logger.error(f"Invalid input: {e}")
        manifest.update(status="error", error=str(e), violations=getattr(e, "violations", []))
        code = EXIT_INVALID
    except NumericalError as e:
        logger.exception(f"Numerical failure: {e}")
        manifest.update(status="error", error=str(e))
        code = EXIT_NUMERICAL

    manifest["exit_code"] = code
    manifest["metrics"] = metrics.to_dict()
    logger.info(f"metrics: {manifest['metrics']}")
    out = getattr(args, "out", None)
    if out is not None:
        reporter.write_manifest(_manifest_path(out), manifest)
    return code


if __name__ == "__main__":
    sys.exit(main())
