from typing import Any, Dict, List, Sequence

from src.reports.writer import CheckResult, Report


def format_residual(value: float, decimals: int = 2) -> str:
    """Scientific notation for residuals, with inf and nan spelled out."""
    if value != value:
        return "nan"
    if value in (float("inf"), float("-inf")):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{decimals}e}"


def format_status(check: CheckResult) -> str:
    if check.passed:
        return "ok"
    # soft checks never fail a run
    return "FAIL" if check.hard else "warn"


def _rows(checks: Sequence[CheckResult]) -> List[List[str]]:
    return [[f"{c.module}.{c.name}", format_residual(c.residual), format_residual(c.tolerance, 1),
             format_status(c)] for c in checks]


def format_check_table(checks: Sequence[CheckResult]) -> str:
    """
    Format checks as a fixed-width table.

    Args:
        checks: Checks in the order they were recorded

    Returns:
        str: Table with a header row, one row per check
    """
    header = ["check", "residual", "tolerance", "status"]
    rows = _rows(checks)
    widths = [max(len(str(row[i])) for row in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(header, widths)),
             "  ".join("-" * width for width in widths)]
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)))
    return "\n".join(lines)


def format_report_summary(report: Report) -> str:
    """
    Format a report for the terminal: title, check table, error and verdict.

    Args:
        report: Finished report of a scenario run or verify suite

    Returns:
        str: Plain-text summary
    """
    title = f"{report.command} · {report.scenario}"
    parts = [title, "=" * len(title)]
    if report.checks:
        parts.append(format_check_table(report.checks))
    else:
        parts.append("(no checks recorded)")

    if report.error is not None:
        parts.append(f"error: {report.error['type']} [{report.error['relation']}] {report.error['message']}")

    failures = report.failures
    soft = [c for c in report.checks if not c.hard and not c.passed]
    verdict = "PASSED" if report.passed else "FAILED"
    parts.append(f"{verdict}: {len(report.checks)} checks, {len(failures)} failed, {len(soft)} soft warnings")
    return "\n".join(parts)


def format_scenario_list(scenarios: Dict[str, Dict[str, Any]]) -> str:
    """One line per built-in scenario: name and subcommand."""
    width = max((len(name) for name in scenarios), default=0)
    return "\n".join(f"{name.ljust(width)}  {spec['command']}" for name, spec in sorted(scenarios.items()))
