import logging
from typing import Callable, Dict, Optional

from src.config import overrides, settings
from src.exceptions import DislocationGeometryError
from src.pipelines.analysis import run_analyze, run_burgers, run_congruence
from src.pipelines.builtin import BUILTIN_SCENARIOS, get_scenario, list_scenarios
from src.pipelines.dynamics import run_evolve, run_flow, run_orowan
from src.pipelines.scenario import COMMANDS, ScenarioConfig, load_scenario, parse_scenario, scenario_from_dict
from src.reports.writer import Report, ReportWriter, provenance

logger = logging.getLogger(__name__)

Runner = Callable[[ScenarioConfig, Report], None]

RUNNERS: Dict[str, Runner] = {
    "analyze": run_analyze,
    "burgers": run_burgers,
    "congruence": run_congruence,
    "evolve": run_evolve,
    "flow": run_flow,
    "orowan": run_orowan,
}


def run_scenario(config: ScenarioConfig, output_dir: Optional[str] = None, fmt: str = "both",
                 seed: Optional[int] = None, tol_scale: Optional[float] = None) -> Report:
    """Run one scenario and, with an output directory, write its artifacts.

    Domain errors end the run and are recorded in ``report.error``; the
    report then fails. Configuration errors propagate.

    Args:
        config: Validated scenario.
        output_dir: Directory for report.json and the CSV tables; nothing is written when None.
        fmt: ``json``, ``csv`` or ``both``.
        seed: Overrides the scenario seed for the test lattice.
        tol_scale: Multiplies every tolerance.
    """
    writer = ReportWriter(output_dir, fmt) if output_dir is not None else None
    seed = config.seed if seed is None else seed
    report = Report(command=config.command, scenario=config.scenario)
    with overrides(config.tolerances, seed, tol_scale):
        report.provenance = provenance(config.config_hash(), settings.seed)
        logger.info(f"Running {config.command} scenario '{config.scenario}' (seed {settings.seed})")
        try:
            RUNNERS[config.command](config, report)
        except DislocationGeometryError as e:
            report.error = {"type": type(e).__name__, "relation": e.relation, "message": e.detail}
            logger.error(f"{config.scenario}: {e}")

    status = "passed" if report.passed else "FAILED"
    logger.info(f"Scenario '{config.scenario}' {status}: {len(report.checks)} checks, "
                f"{len(report.failures)} hard failures")
    if writer is not None:
        writer.write(report)
    return report


__all__ = [
    "BUILTIN_SCENARIOS", "COMMANDS", "RUNNERS", "ScenarioConfig", "get_scenario", "list_scenarios",
    "load_scenario", "parse_scenario", "run_scenario", "scenario_from_dict",
]
