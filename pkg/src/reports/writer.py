"""Reports of scenario runs and verify suites, written as JSON and CSV artifacts."""
import csv
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pytz

from src import __version__

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "both")


@dataclass
class CheckResult:
    """One named invariant: measured residual against its tolerance.

    ``hard`` checks decide the exit code; soft ones are reported only.
    """
    module: str
    name: str
    relation: str
    residual: float
    tolerance: float
    hard: bool = True
    detail: str = ""

    @property
    def passed(self) -> bool:
        residual = float(self.residual)
        return math.isfinite(residual) and residual <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {"module": self.module, "name": self.name, "relation": self.relation,
                "residual": _jsonable(self.residual), "tolerance": self.tolerance,
                "hard": self.hard, "passed": self.passed, "detail": self.detail}


@dataclass
class Table:
    """Plot-ready samples; each column is a (symbol, unit) pair."""
    columns: List[Tuple[str, str]]
    rows: List[Sequence[Any]] = field(default_factory=list)

    def header(self) -> List[str]:
        return [f"{symbol} [{unit}]" for symbol, unit in self.columns]


@dataclass
class Report:
    command: str
    scenario: str
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)
    tables: Dict[str, Table] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)
    error: Optional[Dict[str, str]] = None

    def check(self, module: str, name: str, relation: str, residual: float, tolerance: float,
              hard: bool = True, detail: str = "") -> CheckResult:
        result = CheckResult(module, name, relation, float(residual), float(tolerance), hard, detail)
        self.checks.append(result)
        if not result.passed:
            level = logging.WARNING if hard else logging.INFO
            logger.log(level, f"Check {module}.{name} failed: {relation} residual {result.residual:.3e} "
                              f"> {tolerance:.1e}")
        return result

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks if c.hard)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.hard and not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "scenario": self.scenario,
            "passed": self.passed,
            "results": _jsonable(self.results),
            "checks": [c.to_dict() for c in self.checks],
            "provenance": _jsonable(self.provenance),
            "error": self.error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)


def provenance(config_hash: str, seed: int) -> Dict[str, Any]:
    """Config hash, seed, package version and a UTC timestamp."""
    return {"config_hash": config_hash, "seed": int(seed), "version": __version__,
            "timestamp": datetime.now(pytz.utc).isoformat()}


def _jsonable(value: Any) -> Any:
    """numpy and complex values to plain JSON types; NaN and ±inf become null."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _csv_cell(value: Any) -> Any:
    value = _jsonable(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


class ReportWriter:
    """Writes ``report.json`` and one ``<table>.csv`` per table into an output directory."""

    def __init__(self, output_dir, fmt: str = "both"):
        if fmt not in FORMATS:
            raise ValueError(f"Unsupported format: {fmt}. Supported formats: {', '.join(FORMATS)}")
        self.output_dir = Path(output_dir)
        self.fmt = fmt

    def write(self, report: Report) -> List[Path]:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        written = []
        if self.fmt in ("json", "both"):
            path = self.output_dir / "report.json"
            path.write_text(report.to_json() + "\n", encoding="utf-8")
            written.append(path)
        if self.fmt in ("csv", "both"):
            for name, table in sorted(report.tables.items()):
                written.append(self.write_table(name, table))
        for path in written:
            logger.info(f"Wrote {path}")
        return written

    def write_table(self, name: str, table: Table) -> Path:
        path = self.output_dir / f"{name}.csv"
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(table.header())
            for row in table.rows:
                writer.writerow([_csv_cell(v) for v in row])
        return path


def lattice_table(points: np.ndarray, values: Dict[str, Tuple[np.ndarray, str]]) -> Table:
    """One row per point: coordinates followed by the flattened components of each field.

    ``values`` maps a symbol to (array of shape (N, ...), unit); components are
    suffixed with their indices, e.g. ``alpha_13``.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    columns = [("X1", "cm"), ("X2", "cm"), ("X3", "cm")]
    blocks = [points]
    for symbol, (array, unit) in values.items():
        array = np.asarray(array, dtype=float).reshape(len(points), -1)
        shape = np.asarray(values[symbol][0]).shape[1:]
        if shape:
            for index in np.ndindex(*shape):
                columns.append((f"{symbol}_{''.join(str(i + 1) for i in index)}", unit))
        else:
            columns.append((symbol, unit))
        blocks.append(array)
    data = np.concatenate(blocks, axis=1)
    return Table(columns, [list(row) for row in data])


def records_table(records: Iterable[Dict[str, Any]], units: Dict[str, str]) -> Table:
    """Table from dict records, columns in the order of ``units``."""
    columns = list(units.items())
    return Table(columns, [[record.get(symbol) for symbol, _ in columns] for record in records])
