# core/config_loader.py
"""
Scenario file loader & validator.

Usage:
    from core.config_loader import load_scenario, dump_scenario
    sc = load_scenario(Path("zeno/config/scenarios/fig2a.json"))
    dump_scenario(sc, Path("/tmp/copy.json"))

Scenario files are single JSON documents. Complex numbers are [re, im]
pairs and matrices are lists of rows:

    {
      "label": "fig2a",
      "system": {"dim_A": 1, "dim_B": 2, "omegas_A": [0.0], "gammas_A": [5.0],
                 "B": [[[0, 0], [0.5, 0]], [[0.5, 0], [1, 0]]],
                 "C": [[[0.5, 0], [0.5, 0]]]},
      "initial": {"p_A": 0.0, "theta": 0.0},          # or {"amplitudes": [[re, im], ...]}
      "grid": {"t_max": 20.0, "n_steps": 400},
      "ewa": {"delta_t_factor": 30.0, "quadrature_n": 2000},
      "sweep": {"axis": "gamma", "values": [2, 5, 10, 100]}
    }

Structural problems (bad JSON, unknown keys, malformed pairs) raise
ScenarioParseError; physically invalid content raises ValidationError.
"""
from __future__ import annotations
import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from core.errors import ScenarioParseError, ValidationError
from core.model import BlockSystem, Scenario, require_valid_scenario

_NUMBER = {"type": "number"}
_COMPLEX = {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _COMPLEX}}

# keep in sync with scenario_to_dict
SCENARIO_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["system", "initial"],
    "additionalProperties": False,
    "properties": {
        "label": {"type": "string"},
        "system": {
            "type": "object",
            "required": ["dim_A", "dim_B", "omegas_A", "gammas_A", "B", "C"],
            "additionalProperties": False,
            "properties": {
                "dim_A": {"type": "integer", "minimum": 1},
                "dim_B": {"type": "integer", "minimum": 1},
                "omegas_A": {"type": "array", "items": _NUMBER},
                "gammas_A": {"type": "array", "items": _NUMBER},
                "B": _MATRIX,
                "C": _MATRIX,
            },
        },
        "initial": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["p_A", "theta"],
                    "additionalProperties": False,
                    "properties": {"p_A": _NUMBER, "theta": _NUMBER},
                },
                {
                    "type": "object",
                    "required": ["amplitudes"],
                    "additionalProperties": False,
                    "properties": {"amplitudes": {"type": "array", "minItems": 1, "items": _COMPLEX}},
                },
            ]
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"t_max": _NUMBER, "n_steps": {"type": "integer"}},
        },
        "ewa": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"delta_t_factor": _NUMBER, "quadrature_n": {"type": "integer"}},
        },
        "sweep": {
            "type": "object",
            "required": ["axis", "values"],
            "additionalProperties": False,
            "properties": {
                "axis": {"enum": ["gamma"]},
                "values": {"type": "array", "items": _NUMBER},
            },
        },
    },
}

_VALIDATOR = Draft7Validator(SCENARIO_SCHEMA)


def _field_path(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def _matrix(rows: List[List[List[float]]], shape, name: str) -> np.ndarray:
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise ValidationError("invalid scenario", [f"{name} must be {shape[0]}x{shape[1]}"])
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def _pairs(values) -> List[List[float]]:
    return [[float(np.real(z)), float(np.imag(z))] for z in values]


def parse_scenario(data: Union[str, Dict[str, Any]]) -> Scenario:
    """
    Build a validated Scenario from a JSON string or an already-decoded
    document. Raises ScenarioParseError or ValidationError.
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ScenarioParseError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e

    error = best_match(_VALIDATOR.iter_errors(data))
    if error is not None:
        raise ScenarioParseError(f"scenario schema validation failed: {error.message}",
                                 field=_field_path(error.absolute_path))

    sysd = data["system"]
    dim_a, dim_b = int(sysd["dim_A"]), int(sysd["dim_B"])
    problems = []
    if len(sysd["omegas_A"]) != dim_a or len(sysd["gammas_A"]) != dim_a:
        problems.append(f"system.omegas_A and system.gammas_A need dim_A = {dim_a} entries")
    if problems:
        raise ValidationError("invalid scenario", problems)

    system = BlockSystem(
        omegas_A=tuple(sysd["omegas_A"]),
        gammas_A=tuple(sysd["gammas_A"]),
        B_block=_matrix(sysd["B"], (dim_b, dim_b), "system.B"),
        C_block=_matrix(sysd["C"], (dim_a, dim_b), "system.C"),
    )

    init = data["initial"]
    grid = data.get("grid", {})
    ewa = data.get("ewa", {})
    sweep = data.get("sweep")
    defaults = Scenario(system=system)
    sc = Scenario(
        system=system,
        p_A=float(init.get("p_A", 0.0)),
        theta=float(init.get("theta", 0.0)),
        amplitudes=tuple(complex(re, im) for re, im in init["amplitudes"]) if "amplitudes" in init else None,
        t_max=float(grid.get("t_max", defaults.t_max)),
        n_steps=int(grid.get("n_steps", defaults.n_steps)),
        delta_t_factor=float(ewa.get("delta_t_factor", defaults.delta_t_factor)),
        quadrature_n=int(ewa.get("quadrature_n", defaults.quadrature_n)),
        label=data.get("label", ""),
        sweep_axis=sweep["axis"] if sweep else None,
        sweep_values=tuple(sweep["values"]) if sweep else (),
    )
    return require_valid_scenario(sc)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Load and validate a scenario file. Raises:
      - FileNotFoundError if path missing
      - ScenarioParseError on malformed JSON or schema violations
      - ValidationError on invalid content
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"Scenario file not found: {p}")
    return parse_scenario(p.read_text(encoding="utf-8"))


def scenario_to_dict(sc: Scenario) -> Dict[str, Any]:
    """Inverse of parse_scenario."""
    s = sc.system
    out: Dict[str, Any] = {
        "label": sc.label,
        "system": {
            "dim_A": s.dim_A,
            "dim_B": s.dim_B,
            "omegas_A": list(s.omegas_A),
            "gammas_A": list(s.gammas_A),
            "B": [_pairs(row) for row in s.B_block],
            "C": [_pairs(row) for row in s.C_block],
        },
        "initial": ({"amplitudes": _pairs(sc.amplitudes)} if sc.amplitudes is not None
                    else {"p_A": sc.p_A, "theta": sc.theta}),
        "grid": {"t_max": sc.t_max, "n_steps": sc.n_steps},
        "ewa": {"delta_t_factor": sc.delta_t_factor, "quadrature_n": sc.quadrature_n},
    }
    if sc.sweep_axis is not None:
        out["sweep"] = {"axis": sc.sweep_axis, "values": list(sc.sweep_values)}
    return out


def dump_scenario(sc: Scenario, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n", encoding="utf-8")
    return p
