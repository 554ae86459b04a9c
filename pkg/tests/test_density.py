#!/usr/bin/env python3
"""
Dislocation density tests: anholonomy, torsion, α = γ + ½t·e and the scalar density.
"""

import logging
import math
import sys

import numpy as np
import pytest

from src.config import settings
from src.dislocation.density import (DislocationDensity, ScalarDensitySpec, anholonomy, dislocation_tensor,
                                     is_holonomic, torsion_tensor, total_line_length)
from src.exceptions import NonPositiveDensity, ReconstructionFailure
from src.geometry.fields import AnalyticField

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)


class TestClosedForms:
    """Closed-form densities of the built-in coframes"""

    def test_screw(self, bundle_factory, lattice):
        density = dislocation_tensor(bundle_factory("screw").frame)
        alpha = density.alpha(lattice)
        expected = np.zeros((3, 3))
        expected[2, 2] = 0.1
        logger.info(f"Screw α at origin: {alpha[0].tolist()}")

        assert np.max(np.abs(alpha - expected)) < 1e-12
        assert np.max(np.abs(density.t(lattice))) < 1e-12
        S = torsion_tensor(density.frame).at(lattice)
        assert S[0, 0, 1, 2] == pytest.approx(0.05)
        assert S[0, 1, 0, 2] == pytest.approx(-0.05)

    def test_edge(self, bundle_factory, lattice):
        density = dislocation_tensor(bundle_factory("edge").frame)
        alpha = density.alpha(lattice)
        expected = np.zeros((3, 3))
        expected[2, 0] = 0.1

        assert np.max(np.abs(alpha - expected)) < 1e-12
        assert np.max(np.abs(density.t(lattice) - [0.0, 0.1, 0.0])) < 1e-12

    def test_umbilical(self, bundle_factory, lattice):
        density = dislocation_tensor(bundle_factory("umbilical").frame)
        alpha, gamma, t = density.decompose(lattice)
        expected = np.zeros((3, 3))
        expected[0, 1], expected[1, 0] = 0.5, -0.5

        assert np.max(np.abs(alpha - expected)) < 1e-12
        assert np.max(np.abs(gamma)) < 1e-12
        assert np.max(np.abs(t - [0.0, 0.0, 1.0])) < 1e-12

    def test_epsilon_flips_alpha(self, bundle_factory, lattice):
        frame = bundle_factory("umbilical").frame
        plus = DislocationDensity(frame).alpha(lattice)
        minus = DislocationDensity(frame, epsilon=-1).alpha(lattice)
        assert np.max(np.abs(plus + minus)) < 1e-15
        assert dislocation_tensor(frame.with_epsilon(-1)).epsilon == -1


class TestInvariants:
    """Identities every dislocation density satisfies"""

    @pytest.mark.parametrize("name", ["holonomic", "screw", "edge", "umbilical"])
    def test_identities(self, name, bundle_factory, lattice):
        frame = bundle_factory(name).frame
        density = dislocation_tensor(frame)
        structure = anholonomy(frame)
        round_trip = density.round_trip_residual(lattice)
        trace = density.trace_identity_residual(lattice)
        reconstruction = density.reconstruction_residual(lattice)
        logger.info(f"{name}: round trip {round_trip:.2e}, trace {trace:.2e}, reconstruction {reconstruction:.2e}")

        assert round_trip < settings.tol("round_trip")
        assert trace < settings.tol("trace_identity")
        assert reconstruction < settings.tol("reconstruction")
        assert structure.antisymmetry_residual(lattice) < settings.tol("antisymmetry")

    def test_structure_from_forms(self, bundle_factory, lattice):
        frame = bundle_factory("umbilical").frame
        from_bracket = anholonomy(frame).at(lattice)
        from_forms = torsion_tensor(frame).structure_from_forms(lattice)
        assert np.max(np.abs(from_bracket - from_forms)) < 1e-12

    def test_is_holonomic(self, bundle_factory):
        flat, worst = is_holonomic(bundle_factory("holonomic").frame, 1e-10)
        assert flat and worst == 0.0

        flat, worst = is_holonomic(bundle_factory("screw").frame, 1e-10)
        assert not flat
        assert worst == pytest.approx(0.05)

    def test_is_holonomic_tolerance(self, bundle_factory):
        with pytest.raises(ValueError):
            is_holonomic(bundle_factory("holonomic").frame, 0.0)

    def test_reconstruction_failure(self, bundle_factory, monkeypatch):
        monkeypatch.setattr(DislocationDensity, "reconstruction_residual", lambda self, points: 1.0)
        with pytest.raises(ReconstructionFailure):
            dislocation_tensor(bundle_factory("screw").frame)


class TestScalarDensity:
    """Tests for ρ and the total line length"""

    def test_line_length_in_umbilical_metric(self, bundle_factory, unit_chart):
        bundle = bundle_factory("umbilical")
        rho = ScalarDensitySpec.constant(unit_chart, 1.0)
        length = total_line_length(rho, bundle.metric, ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)))
        logger.info(f"Total line length: {length:.12f}")
        assert length == pytest.approx(1.0 - math.exp(-1.0), abs=1e-10)

    def test_non_positive_density(self, unit_chart):
        with pytest.raises(NonPositiveDensity):
            ScalarDensitySpec.constant(unit_chart, 0.0)
        with pytest.raises(NonPositiveDensity):
            ScalarDensitySpec(AnalyticField(unit_chart, lambda p: p[..., 0], validate=False))

    def test_rejects_vector_density(self, unit_chart):
        with pytest.raises(ValueError):
            ScalarDensitySpec(AnalyticField.constant(unit_chart, [1.0, 1.0, 1.0]))


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
