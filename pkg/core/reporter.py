# core/reporter.py
"""
Tabular output for scenario runs and sweeps (CSV or JSON through pandas)
and the per-run manifest.

Implements:
    write_series(result, path, fmt)   columns t, f_ewa, f_z, f_zn, norm_full, norm_A, norm_B, psiA_bound, flags
    write_summary(sweep, path, fmt)   axis_value, min_f_ewa, min_f_zn, max_dB_entry, ...
    write_bound(result, path, fmt)    t, norm_A, psiA_bound, psiA_bound_conservative
    write_manifest(path, manifest)

The series psiA_bound column is the literal bound when every omega_n is zero
and the conservative one otherwise.

CSV floats use %.15g, so identical inputs give byte-identical files.
"""
from __future__ import annotations
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd

from core.experiments import ScenarioResult, SweepResult

logger = logging.getLogger("zenosim.reporter")

FLOAT_FORMAT = "%.15g"
FORMATS = ("csv", "json")

SERIES_COLUMNS = ["t", "f_ewa", "f_z", "f_zn", "norm_full", "norm_A", "norm_B", "psiA_bound", "flags"]
SUMMARY_COLUMNS = ["axis_value", "min_f_ewa", "min_f_zn", "max_dB_entry",
                   "min_f_z", "mean_f_ewa", "mean_f_z", "mean_f_zn", "flagged"]
BOUND_COLUMNS = ["t", "norm_A", "psiA_bound", "psiA_bound_conservative"]


def series_frame(result: ScenarioResult) -> pd.DataFrame:
    s, ex = result.series, result.exact
    return pd.DataFrame({
        "t": s.times,
        "f_ewa": s.f_ewa,
        "f_z": s.f_z,
        "f_zn": s.f_zn,
        "norm_full": ex.norms_full,
        "norm_A": ex.norms_A,
        "norm_B": ex.norms_B,
        "psiA_bound": result.applicable_bound,
        "flags": list(s.flags),
    }, columns=SERIES_COLUMNS)


def summary_frame(sweep: SweepResult) -> pd.DataFrame:
    rows = [{c: getattr(row, c) for c in SUMMARY_COLUMNS} for row in sweep.summary]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def bound_frame(result: ScenarioResult) -> pd.DataFrame:
    return pd.DataFrame({
        "t": result.times,
        "norm_A": result.exact.norms_A,
        "psiA_bound": result.psi_a_bound,
        "psiA_bound_conservative": result.psi_a_bound_conservative,
    }, columns=BOUND_COLUMNS)


def write_frame(df: pd.DataFrame, path: Union[str, Path], fmt: str = "csv") -> Path:
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format '{fmt}', expected one of {FORMATS}")
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        df.to_csv(p, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    else:
        df.to_json(p, orient="records", double_precision=15, indent=2)
    logger.debug(f"wrote {len(df)} rows to {p}")
    return p


def write_series(result: ScenarioResult, path: Union[str, Path], fmt: str = "csv") -> Path:
    return write_frame(series_frame(result), path, fmt)


def write_summary(sweep: SweepResult, path: Union[str, Path], fmt: str = "csv") -> Path:
    return write_frame(summary_frame(sweep), path, fmt)


def write_bound(result: ScenarioResult, path: Union[str, Path], fmt: str = "csv") -> Path:
    return write_frame(bound_frame(result), path, fmt)


def write_manifest(path: Union[str, Path], manifest: Dict[str, Any]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(manifest, indent=2, default=str), encoding="utf-8")
    return p
