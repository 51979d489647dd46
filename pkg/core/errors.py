# core/errors.py
"""
Exception hierarchy for ZenoSim.

The CLI maps these onto exit codes (see zeno/runner.py):
    ScenarioParseError            -> 2
    ValidationError, DimensionError -> 3
    NumericalError (and children) -> 4
"""
from __future__ import annotations
from typing import Iterable, List, Optional


class ZenoSimError(Exception):
    """Base class for every error raised by the engine."""


class DimensionError(ZenoSimError, ValueError):
    pass


class ValidationError(ZenoSimError, ValueError):
    def __init__(self, message: str, violations: Optional[Iterable[str]] = None):
        self.violations: List[str] = list(violations or [])
        if self.violations:
            message = f"{message}: " + "; ".join(self.violations)
        super().__init__(message)


class NumericalError(ZenoSimError, ArithmeticError):
    pass


class NearDefectiveError(NumericalError):
    pass


class SingularConfigurationError(NumericalError):
    pass


class QuadratureRangeError(NumericalError):
    pass


class IntegratorStepError(NumericalError):
    pass


class ScenarioParseError(ZenoSimError, ValueError):
    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        where = []
        if field:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}, column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class UnknownPresetError(ZenoSimError, KeyError):
    def __init__(self, name: str, valid: Iterable[str]):
        self.name = name
        self.valid = sorted(valid)
        super().__init__(f"unknown preset '{name}'; valid presets: {', '.join(self.valid)}")

    def __str__(self) -> str:
        return self.args[0]
