#!/usr/bin/env python3
"""
Pipeline tests: built-in scenarios run end to end and write their artifacts.
"""

import json
import logging
import sys

import pytest

from src.config import settings
from src.pipelines import RUNNERS, COMMANDS, get_scenario, parse_scenario, run_scenario
from src.utils.formatters import format_report_summary

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)

MIRROR = """\
scenario: mirror
command: analyze
frame:
  coframe:
    - ["-1", "0", "0"]
    - ["0", "1", "0"]
    - ["0", "0", "1"]
"""


def test_every_command_has_a_runner():
    assert set(RUNNERS) == set(COMMANDS)


class TestStaticScenarios:
    """Frame, density and Burgers scenarios"""

    @pytest.mark.parametrize("name", ["holonomic_analyze", "screw_analyze", "edge_analyze", "umbilical_analyze"])
    def test_analyze(self, name, tmp_path):
        report = run_scenario(get_scenario(name), output_dir=str(tmp_path))
        logger.info(f"\n{format_report_summary(report)}")

        assert report.passed
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "fields.csv").exists()

    def test_holonomic_results(self):
        report = run_scenario(get_scenario("holonomic_analyze"))
        assert report.results["is_holonomic"]
        assert report.results["max_alpha"] < 1e-10

    def test_screw_burgers(self, tmp_path):
        report = run_scenario(get_scenario("screw_burgers"), output_dir=str(tmp_path), fmt="json")
        data = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))

        assert report.passed
        assert data["passed"] is True
        assert data["provenance"]["config_hash"] == get_scenario("screw_burgers").config_hash()
        assert not (tmp_path / "burgers.csv").exists()

    def test_circle_frenet_does_not_crash(self):
        report = run_scenario(get_scenario("circle_frenet"))
        logger.info(f"circle_frenet error: {report.error}")
        assert report.command == "congruence"

    def test_umbilical_principal(self, tmp_path):
        report = run_scenario(get_scenario("umbilical_principal"), output_dir=str(tmp_path))
        checks = {check.name: check for check in report.checks}

        assert report.passed
        assert checks["principal_burgers"].hard
        assert not checks["principal_modulus"].hard
        assert report.results["principal"]["mu_axial"] == pytest.approx(0.5)
        assert (tmp_path / "principal.csv").exists()

    def test_domain_error_is_recorded(self, tmp_path):
        report = run_scenario(parse_scenario(MIRROR), output_dir=str(tmp_path))

        assert not report.passed
        assert report.error["type"] == "SingularCoframe"
        assert "negatively oriented" in report.error["message"]
        assert json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))["error"]["type"] == "SingularCoframe"


class TestDynamicScenarios:
    """Evolution, flow and Orowan scenarios"""

    def test_static_evolve(self, tmp_path):
        report = run_scenario(get_scenario("static_evolve"), output_dir=str(tmp_path))
        assert report.passed
        assert (tmp_path / "profile.csv").exists()

    def test_rotation_flow(self):
        report = run_scenario(get_scenario("rotation_flow"))
        assert report.passed
        assert report.results["killing"]
        assert report.results["consistent"]
        assert report.results["conservative"]
        assert set(report.results["residuals"]) == {"lie_relation", "plastic_equals_intrinsic", "metric_rate",
                                                    "volume_rate", "incompressibility"}

    def test_uniaxial_flow(self):
        report = run_scenario(get_scenario("uniaxial_flow"))
        assert report.passed
        assert not report.results["killing"]
        assert not report.results["consistent"]
        assert not report.results["conservative"]

    def test_exponential_distortion_flow(self):
        report = run_scenario(get_scenario("exponential_distortion_flow"))
        logger.info(f"Consistency: {report.results['consistency']}")

        assert report.passed
        assert report.results["consistent"]
        assert not report.results["conservative"]

    def test_orowan_flat(self, tmp_path):
        report = run_scenario(get_scenario("orowan_flat"), output_dir=str(tmp_path))
        assert report.passed
        assert (tmp_path / "glide.csv").exists()

    def test_orowan_results(self):
        report = run_scenario(get_scenario("orowan_flat"))
        results = report.results
        logger.info(f"Orowan residuals: {results['residuals']}")

        assert {"H", "rho_bg", "v_g", "gamma_dot_directional", "gamma_dot_aligned", "dissipation"} <= set(results)
        assert set(results["residuals"]) == {"killing", "inextensibility", "shear_relation", "stress_gradient"}
        assert results["gamma_dot_aligned"] == pytest.approx(results["H"] * results["v_g"])
        assert results["gamma_dot_directional"] == pytest.approx(results["gamma_dot_aligned"])
        assert results["residuals"]["shear_relation"] < settings.tol("orowan_relation")

    def test_orowan_sphere(self):
        report = run_scenario(get_scenario("orowan_sphere"))
        assert report.error is None


class TestOverrides:
    """Seeds and tolerance scales apply to a single run"""

    def test_settings_restored(self):
        seed, scale = settings.seed, settings.tol_scale
        report = run_scenario(get_scenario("holonomic_analyze"), seed=11, tol_scale=10.0)

        assert report.provenance["seed"] == 11
        assert settings.seed == seed
        assert settings.tol_scale == scale

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            run_scenario(get_scenario("holonomic_analyze"), output_dir=str(tmp_path), fmt="xml")


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
