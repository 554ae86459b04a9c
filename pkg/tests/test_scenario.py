#!/usr/bin/env python3
"""
Scenario file tests: YAML parsing, validation errors with line and field, built-in scenarios.
"""

import logging
import sys
import textwrap

import pytest

from src.exceptions import ConfigParseError
from src.pipelines import get_scenario, list_scenarios, load_scenario, parse_scenario
from src.pipelines.scenario import ScenarioConfig

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)

SCREW = textwrap.dedent("""\
    scenario: screw demo
    command: burgers
    frame:
      builtin: screw
      params:
        b0: 0.1
    tolerances:
      stokes_analytic: 1.0e-7
    """)


class TestParsing:
    """Tests for valid scenario documents"""

    def test_valid_scenario(self):
        config = parse_scenario(SCREW)
        logger.info(f"Parsed scenario: {config.scenario}")

        assert config.command == "burgers"
        assert config.frame.spec().describe() == {"name": "screw", "params": {"b0": 0.1}}
        assert config.tolerances == {"stokes_analytic": 1e-7}
        assert config.burgers.patch.orientation == 1
        assert config.units.length == "cm"

    def test_config_hash(self):
        first = parse_scenario(SCREW)
        second = parse_scenario(SCREW)
        reseeded = parse_scenario(SCREW + "seed: 7\n")

        assert len(first.config_hash()) == 64
        assert first.config_hash() == second.config_hash()
        assert first.config_hash() != reseeded.config_hash()

    def test_expression_frame(self):
        config = parse_scenario(textwrap.dedent("""\
            command: analyze
            frame:
              coframe:
                - ["1", "0", "0"]
                - ["0", "1", "0"]
                - ["0", "0.1*X1", "1"]
            """))
        assert config.frame.spec().name == "expression"

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "screw.yaml"
        path.write_text(SCREW, encoding="utf-8")
        assert load_scenario(path).scenario == "screw demo"


class TestValidationErrors:
    """Configuration errors name the offending line and field"""

    def test_unknown_command(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_scenario("scenario: broken\ncommand: explode\n")
        logger.info(f"Error: {excinfo.value}")
        assert excinfo.value.line == 2
        assert excinfo.value.field == "command"

    def test_missing_frame(self):
        with pytest.raises(ConfigParseError, match="needs a 'frame' section"):
            parse_scenario("command: analyze\n")

    def test_unknown_builtin_frame(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_scenario("command: analyze\nframe:\n  builtin: twist\n")
        assert excinfo.value.field == "frame"
        assert excinfo.value.line == 3

    def test_unknown_tolerance(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_scenario(SCREW.replace("stokes_analytic", "stokes_magic"))
        assert excinfo.value.field == "tolerances"

    def test_unknown_section(self):
        with pytest.raises(ConfigParseError):
            parse_scenario(SCREW + "extras: 1\n")

    def test_bad_expression(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_scenario("command: evolve\nevolve:\n  kappa: tan(s)\n")
        assert excinfo.value.field == "evolve.kappa"
        assert excinfo.value.line == 3

    def test_times_window(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_scenario("command: flow\nflow:\n  times:\n    start: 1.0\n    stop: 0.5\n")
        assert excinfo.value.field == "flow.times"

    def test_invalid_yaml(self):
        with pytest.raises(ConfigParseError, match="invalid YAML"):
            parse_scenario("command: [analyze\n")

    def test_document_must_be_a_mapping(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_scenario("- analyze\n- burgers\n")
        assert excinfo.value.line == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError, match="cannot read"):
            load_scenario(tmp_path / "absent.yaml")

    def test_config_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            parse_scenario("command: 3\n")


class TestBuiltinScenarios:
    """Tests for the scenario registry"""

    @pytest.mark.parametrize("name", list_scenarios())
    def test_validates(self, name):
        config = get_scenario(name)
        assert isinstance(config, ScenarioConfig)
        assert config.scenario == name

    def test_unknown_scenario(self):
        with pytest.raises(ValueError, match="Please choose from"):
            get_scenario("nonexistent")


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
