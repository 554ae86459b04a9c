"""Named scenarios shipped with the package, usable through ``--scenario``."""
import logging
from typing import Any, Dict, List

from src.pipelines.scenario import ScenarioConfig, scenario_from_dict

logger = logging.getLogger(__name__)

_UNIT_PATCH = {"origin": [-0.5, -0.5, 0.0], "edge_u": [1.0, 0.0, 0.0], "edge_v": [0.0, 1.0, 0.0]}

BUILTIN_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "holonomic_analyze": {
        "command": "analyze",
        "frame": {"builtin": "holonomic"},
    },
    "screw_analyze": {
        "command": "analyze",
        "frame": {"builtin": "screw", "params": {"b0": 0.1}},
        "analyze": {"l": [0.0, 0.0, 1.0]},
    },
    "edge_analyze": {
        "command": "analyze",
        "frame": {"builtin": "edge", "params": {"beta": 0.1}},
        "analyze": {"l": [0.0, 0.0, 1.0]},
    },
    "umbilical_analyze": {
        "command": "analyze",
        "frame": {"builtin": "umbilical", "params": {"h0": 0.5}},
        "analyze": {"l": [1.0, 0.0, 0.0], "points": [[0.1, 0.2, 0.3]],
                    "region": [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]},
    },
    "screw_burgers": {
        "command": "burgers",
        "frame": {"builtin": "screw", "params": {"b0": 0.1}},
        "burgers": {"patch": _UNIT_PATCH},
    },
    "screw_burgers_gridded": {
        "command": "burgers",
        "chart": {"cells": 16},
        "frame": {"builtin": "screw", "params": {"b0": 0.1}, "gridded": True},
        "burgers": {"patch": _UNIT_PATCH},
    },
    "umbilical_frenet": {
        "command": "congruence",
        "frame": {"builtin": "umbilical", "params": {"h0": 0.5}},
        "congruence": {"mode": "frenet", "l": [1.0, 0.0, 0.0], "start": [-0.25, 0.1, 0.2],
                       "length": 0.5, "step": 0.01, "samples": 6},
    },
    "circle_frenet": {
        "command": "congruence",
        "chart": {"lower": [-2.0, -2.0, -1.0], "upper": [2.0, 2.0, 1.0]},
        "frame": {"builtin": "holonomic"},
        "congruence": {"mode": "frenet", "start": [1.0, 0.0, 0.0], "length": 1.0, "step": 0.01, "samples": 5,
                       "l_coordinates": ["(-X2)*(X1^2 + X2^2)^(-1/2)", "X1*(X1^2 + X2^2)^(-1/2)", "0"]},
    },
    "umbilical_principal": {
        "command": "congruence",
        "frame": {"builtin": "umbilical", "params": {"h0": 0.5}},
        "congruence": {"mode": "principal", "point": [0.1, 0.2, 0.3], "phis": 8},
    },
    "static_evolve": {
        "command": "evolve",
        "evolve": {"kappa": "1", "theta": "pi/2", "omega": "0.5", "zeta": "0", "samples": 64,
                   "closure": {"variable": "theta", "expression": "pi/2"}, "steps": 20, "dt": 0.01,
                   "static": {"kappa0": 1.0, "omega0": 0.5, "zeta0": 0.0, "length": 10.0, "orientation": 1}},
    },
    "rotation_flow": {
        "command": "flow",
        "flow": {"velocity": ["-X2", "X1", "0"], "seeds": [[0.5, 0.0, 0.0]], "T": 6.283185307179586,
                 "dt": 0.01, "closed_orbit": True},
    },
    "uniaxial_flow": {
        "command": "flow",
        "flow": {"velocity": ["0.2*X1", "0", "0"], "seeds": [[0.1, 0.0, 0.0]], "T": 1.0, "dt": 0.01},
    },
    "exponential_distortion_flow": {
        "command": "flow",
        "flow": {"velocity": ["0.1*X1", "0.1*X2", "0.1*X3"], "seeds": [[0.1, 0.1, 0.1]], "T": 1.0, "dt": 0.01,
                 "distortion": [["exp(0.1*t)", "0", "0"], ["0", "exp(0.1*t)", "0"], ["0", "0", "exp(0.1*t)"]],
                 "times": {"start": 0.0, "stop": 1.0, "samples": 101}},
    },
    "orowan_flat": {
        "command": "orowan",
        "orowan": {"h0": 0.5, "leaf": "flat", "point": [0.1, 0.2, 0.0], "variant": "aligned",
                   "stress": {"T0": 1.0, "n_exp": 1.0, "v0": 2.0, "tau0": 1.0}},
    },
    "orowan_sphere": {
        "command": "orowan",
        "orowan": {"h0": 0.5, "leaf": "sphere", "point": [0.1, 0.2, 0.0], "psi": 0.3,
                   "stress": {"T0": 1.0, "n_exp": 2.0, "v0": 2.0, "tau0": 1.0}},
    },
}


def list_scenarios() -> List[str]:
    return sorted(BUILTIN_SCENARIOS)


def get_scenario(name: str) -> ScenarioConfig:
    """Validated copy of a built-in scenario.

    Raises:
        ValueError: If the name is not a built-in scenario
    """
    if name not in BUILTIN_SCENARIOS:
        raise ValueError(f"Scenario {name} is not built in. Please choose from: {', '.join(list_scenarios())}")
    return scenario_from_dict({"scenario": name, **BUILTIN_SCENARIOS[name]})
