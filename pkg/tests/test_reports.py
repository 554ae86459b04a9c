#!/usr/bin/env python3
"""
Report tests: checks, JSON and CSV artifacts, lattice tables and terminal formatting.
"""

import csv
import json
import logging
import sys

import numpy as np
import pytest

from src.reports.writer import CheckResult, Report, ReportWriter, Table, lattice_table, records_table
from src.utils.formatters import (format_check_table, format_report_summary, format_residual,
                                  format_scenario_list, format_status)

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)


@pytest.fixture
def report() -> Report:
    report = Report("burgers", "screw demo")
    report.check("burgers", "stokes", "circuit equals flux", 1e-9, 1e-7)
    report.check("burgers", "convergence", "gridded flux converges", 0.5, 1e-3, hard=False)
    report.results["psi"] = 1.0 + 2.0j
    report.results["kappa"] = np.array([1.0, np.nan])
    report.tables["trace"] = Table([("s", "cm"), ("kappa", "1/cm")], [[0.0, 1.0], [0.5, float("inf")]])
    return report


class TestChecks:
    """Pass and fail logic of named checks"""

    def test_passes_within_tolerance(self):
        assert CheckResult("m", "n", "r", 1e-9, 1e-8).passed
        assert not CheckResult("m", "n", "r", 1e-7, 1e-8).passed

    @pytest.mark.parametrize("residual", [float("nan"), float("inf")])
    def test_non_finite_residual_fails(self, residual):
        assert not CheckResult("m", "n", "r", residual, 1.0).passed

    def test_soft_failure_keeps_report_passing(self, report):
        logger.info(f"Failures: {[c.name for c in report.failures]}")
        assert report.passed
        assert report.failures == []

    def test_hard_failure(self, report):
        report.check("burgers", "closure", "circuit closes", 1.0, 1e-6)
        assert not report.passed
        assert [c.name for c in report.failures] == ["closure"]

    def test_error_fails_report(self, report):
        report.error = {"type": "ZeroBurgers", "relation": "b = 0", "message": "vanishing Burgers vector"}
        assert not report.passed


class TestSerialization:
    """JSON output of reports"""

    def test_json(self, report):
        data = json.loads(report.to_json())

        assert data["passed"] is True
        assert data["results"]["psi"] == {"re": 1.0, "im": 2.0}
        assert data["results"]["kappa"] == [1.0, None]
        assert data["checks"][1]["hard"] is False
        assert data["error"] is None

    def test_records_table(self):
        table = records_table([{"s": 0.0, "kappa": 1.0}, {"s": 1.0}], {"s": "cm", "kappa": "1/cm"})
        assert table.header() == ["s [cm]", "kappa [1/cm]"]
        assert table.rows == [[0.0, 1.0], [1.0, None]]


class TestReportWriter:
    """Artifacts written to the output directory"""

    def test_writes_json_and_csv(self, report, tmp_path):
        written = ReportWriter(tmp_path / "out").write(report)

        assert sorted(path.name for path in written) == ["report.json", "trace.csv"]
        with (tmp_path / "out" / "trace.csv").open(newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["s [cm]", "kappa [1/cm]"]
        assert rows[2] == ["0.5", ""]

    def test_json_only(self, report, tmp_path):
        written = ReportWriter(tmp_path, fmt="json").write(report)
        assert [path.name for path in written] == ["report.json"]

    def test_unsupported_format(self, tmp_path):
        with pytest.raises(ValueError, match="Supported formats"):
            ReportWriter(tmp_path, fmt="xml")


class TestLatticeTable:
    """Per-point tables of tensor fields"""

    def test_columns(self):
        points = np.zeros((2, 3))
        table = lattice_table(points, {"alpha": (np.ones((2, 3, 3)), "1/cm"), "rho": (np.ones(2), "1/cm^2")})

        assert len(table.columns) == 3 + 9 + 1
        assert table.columns[3] == ("alpha_11", "1/cm")
        assert table.columns[-1] == ("rho", "1/cm^2")
        assert len(table.rows) == 2 and len(table.rows[0]) == 13


class TestFormatters:
    """Terminal formatting"""

    def test_format_residual(self):
        assert format_residual(1.234e-5) == "1.23e-05"
        assert format_residual(float("nan")) == "nan"
        assert format_residual(float("inf")) == "inf"

    def test_format_status(self):
        assert format_status(CheckResult("m", "n", "r", 0.0, 1.0)) == "ok"
        assert format_status(CheckResult("m", "n", "r", 2.0, 1.0)) == "FAIL"
        assert format_status(CheckResult("m", "n", "r", 2.0, 1.0, hard=False)) == "warn"

    def test_check_table(self, report):
        lines = format_check_table(report.checks).splitlines()
        assert lines[0].split() == ["check", "residual", "tolerance", "status"]
        assert len(lines) == 2 + len(report.checks)

    def test_summary(self, report):
        report.error = {"type": "ZeroBurgers", "relation": "b = 0", "message": "vanishing"}
        summary = format_report_summary(report)
        logger.info(f"\n{summary}")

        assert summary.startswith("burgers · screw demo")
        assert "error: ZeroBurgers" in summary
        assert summary.splitlines()[-1] == "FAILED: 2 checks, 0 failed, 1 soft warnings"

    def test_empty_summary(self):
        assert "(no checks recorded)" in format_report_summary(Report("verify", "geometry"))

    def test_scenario_list(self):
        listing = format_scenario_list({"b": {"command": "flow"}, "a": {"command": "analyze"}})
        assert listing.splitlines() == ["a  analyze", "b  flow"]


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
