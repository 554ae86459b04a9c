#!/usr/bin/env python3
"""
Verify suite and command-line tests.
"""

import json
import logging
import sys

import pytest

from src.main import EXIT_PASS, EXIT_USAGE, main
from src.utils import tensors
from src.verify import VERIFY_MODULES, resolve_selection, verify_suite

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)


class TestVerifySuite:
    """Seeded invariant checks per module"""

    @pytest.mark.parametrize("module", list(VERIFY_MODULES))
    def test_module_passes(self, module):
        report = verify_suite([module])
        for failure in report.failures:
            logger.error(f"{failure.module}.{failure.name}: {failure.residual:.3e} > {failure.tolerance:.1e}")

        assert report.passed
        assert report.checks
        assert all(check.module == module for check in report.checks)

    def test_aliases(self):
        assert resolve_selection(["density", "geometry"]) == ["geometry_core", "dislocation_density"]
        assert resolve_selection(["all"]) == list(VERIFY_MODULES)
        assert resolve_selection(None) == list(VERIFY_MODULES)

    def test_unknown_module(self):
        with pytest.raises(ValueError, match="Please choose from"):
            resolve_selection(["bogus"])

    def test_wrong_permutation_symbol_is_caught(self, monkeypatch):
        monkeypatch.setattr(tensors, "LEVI_CIVITA", -tensors.LEVI_CIVITA)
        report = verify_suite(["dislocation_density"])
        failed = {check.name for check in report.failures}
        logger.info(f"Failed checks under a negated permutation symbol: {sorted(failed)}")

        assert not report.passed
        assert "screw_round_trip" in failed


class TestCommandLine:
    """Exit codes and artifacts of the command-line entry point"""

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_list_scenarios(self, capsys):
        assert main(["--list-scenarios"]) == EXIT_PASS
        assert "screw_burgers" in capsys.readouterr().out

    def test_unknown_scenario(self, tmp_path):
        assert main(["analyze", "--scenario", "nonexistent", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_bad_config_file(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("command: explode\n", encoding="utf-8")
        assert main(["analyze", "--config", str(path), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_command_mismatch(self, tmp_path):
        assert main(["flow", "--scenario", "screw_burgers", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_scenario_run(self, tmp_path):
        assert main(["burgers", "--scenario", "screw_burgers", "--out", str(tmp_path)]) == EXIT_PASS
        assert json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))["passed"] is True

    def test_verify(self, tmp_path):
        assert main(["verify", "geometry", "--out", str(tmp_path)]) == EXIT_PASS
        data = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert data["command"] == "verify"
        assert (tmp_path / "checks.csv").exists()

    def test_verify_unknown_module(self, tmp_path):
        assert main(["verify", "bogus", "--out", str(tmp_path)]) == EXIT_USAGE


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
