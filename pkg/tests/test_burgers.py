#!/usr/bin/env python3
"""
Burgers vector tests: circuits, surfaces, Stokes agreement and local classification.
"""

import logging
import sys

import numpy as np
import pytest

from src.config import settings
from src.dislocation.burgers import (LineType, burgers_circuit, burgers_from_forms, burgers_surface,
                                     frame_vector_field, local_burgers_classify, stokes_residual)
from src.dislocation.density import ScalarDensitySpec, dislocation_tensor
from src.exceptions import OpenPath, UndefinedBurgersDirection, ZeroBurgers
from src.geometry.curves import ParametricPatch, Polyline

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)

CORNER = (0.0, 0.0, 0.0)
SIDE_U = (1.0, 0.0, 0.0)
SIDE_V = (0.0, 1.0, 0.0)


@pytest.fixture
def patch(unit_chart):
    return ParametricPatch.rectangle(CORNER, SIDE_U, SIDE_V, chart=unit_chart)


class TestBurgersIntegrals:
    """Circuit and surface Burgers vectors of the screw crystal"""

    def test_screw_circuit(self, bundle_factory, patch):
        frame = bundle_factory("screw").frame
        result = burgers_circuit(frame, patch.boundary())
        logger.info(f"Screw circuit Burgers vector: {result.components.tolist()}")

        assert np.allclose(result.components, [0.0, 0.0, 0.1], atol=1e-12)
        assert result.to_dict()["method"] == "circuit"

    def test_open_circuit(self, bundle_factory, unit_chart):
        frame = bundle_factory("screw").frame
        with pytest.raises(OpenPath):
            burgers_circuit(frame, Polyline(np.array([CORNER, SIDE_U, (1.0, 1.0, 0.0)]), chart=unit_chart))

    def test_orientation_flips_sign(self, bundle_factory, patch):
        frame = bundle_factory("screw").frame
        plus = burgers_circuit(frame, patch.boundary()).components
        reversed_circuit = burgers_circuit(frame, patch.boundary().reversed()).components
        minus = burgers_circuit(frame.with_epsilon(-1), patch.boundary()).components

        assert np.allclose(plus, -reversed_circuit, atol=1e-14)
        assert np.allclose(plus, -minus, atol=1e-14)

    def test_stokes_agreement(self, bundle_factory, patch):
        frame = bundle_factory("screw").frame
        density = dislocation_tensor(frame)
        circuit = burgers_circuit(frame, patch.boundary())
        surface = burgers_surface(frame, density, patch)
        forms = burgers_from_forms(frame, density.torsion.forms, patch)
        logger.info(f"circuit {circuit.components}, surface {surface.components}, forms {forms.components}")

        assert stokes_residual(circuit, surface) < settings.tol("stokes_analytic")
        assert stokes_residual(circuit, forms) < settings.tol("stokes_analytic")

    def test_gridded_stokes_agreement(self, bundle_factory, unit_chart, patch):
        frame = bundle_factory("screw", gridded=True).frame
        density = dislocation_tensor(frame)
        circuit = burgers_circuit(frame, patch.boundary())
        surface = burgers_surface(frame, density, patch)
        assert stokes_residual(circuit, surface) < settings.tol("stokes_gridded")

    def test_mean_local_burgers(self, bundle_factory, unit_chart, patch):
        frame = bundle_factory("screw").frame
        rho = ScalarDensitySpec.constant(unit_chart, 1.0)
        surface = burgers_surface(frame, dislocation_tensor(frame), patch, rho=rho)
        flux = surface.extras["line_flux"]

        assert flux > 1.0
        assert surface.extras["mean_local_burgers"][2] == pytest.approx(surface.components[2] / flux)


class TestLocalBurgers:
    """Edge, screw and mixed classification of congruences"""

    def test_screw_line(self, bundle_factory, unit_chart):
        frame = bundle_factory("screw").frame
        l = frame_vector_field(frame, [0.0, 0.0, 1.0])
        local, triple = local_burgers_classify(dislocation_tensor(frame), l,
                                               ScalarDensitySpec.constant(unit_chart, 1.0), [0.2, 0.1, 0.0])
        logger.info(f"Screw line: {local.to_dict()}")

        assert local.line_type is LineType.SCREW
        assert local.b_g == pytest.approx(0.1)
        assert triple is None

    def test_edge_line(self, bundle_factory, unit_chart, lattice):
        frame = bundle_factory("edge").frame
        l = frame_vector_field(frame, [0.0, 0.0, 1.0])
        rho = ScalarDensitySpec.constant(unit_chart, 2.0)
        local, triple = local_burgers_classify(dislocation_tensor(frame), l, rho, [0.3, -0.2, 0.5])

        assert local.line_type is LineType.EDGE
        assert np.allclose(local.b, [0.05, 0.0, 0.0], atol=1e-12)
        assert local.mu == pytest.approx(0.05)
        assert local.volterra
        assert triple.is_edge([0.3, -0.2, 0.5])
        assert np.allclose(triple.at([0.3, -0.2, 0.5])["m"], [1.0, 0.0, 0.0], atol=1e-12)
        assert triple.decomposition_residual(lattice) < 1e-12
        assert triple.gram_residual(lattice) < 1e-12

    def test_mixed_line_without_burgers_direction(self, bundle_factory, unit_chart):
        frame = bundle_factory("screw").frame
        l = frame_vector_field(frame, np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0))
        with pytest.raises(UndefinedBurgersDirection):
            local_burgers_classify(dislocation_tensor(frame), l, ScalarDensitySpec.constant(unit_chart, 1.0),
                                   [0.0, 0.0, 0.0])

    def test_holonomic_has_no_burgers_vector(self, bundle_factory, unit_chart):
        frame = bundle_factory("holonomic").frame
        l = frame_vector_field(frame, [0.0, 0.0, 1.0])
        with pytest.raises(ZeroBurgers):
            local_burgers_classify(dislocation_tensor(frame), l, ScalarDensitySpec.constant(unit_chart, 1.0),
                                   [0.0, 0.0, 0.0])

    def test_non_unit_direction(self, bundle_factory, unit_chart):
        frame = bundle_factory("screw").frame
        l = frame_vector_field(frame, [0.0, 0.0, 2.0])
        with pytest.raises(ValueError, match="g-unit"):
            local_burgers_classify(dislocation_tensor(frame), l, ScalarDensitySpec.constant(unit_chart, 1.0),
                                   [0.0, 0.0, 0.0])


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
