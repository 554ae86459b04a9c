#!/usr/bin/env python3
"""
Bravais frame tests: coframe factory, expression coframes, metric and volume form.
"""

import logging
import sys

import numpy as np
import pytest

from src.config import settings
from src.exceptions import ConfigParseError, SingularCoframe
from src.frames import ExpressionCoframe, MetricField, build_frame_bundle, get_coframe
from src.frames.base import CoframeSpec
from src.geometry.fields import GriddedField
from src.utils import tensors

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)


class TestCoframeFactory:
    """Tests for the built-in coframe factory"""

    def test_supported_names(self):
        names = CoframeSpec.get_supported_coframes()
        logger.info(f"Supported coframes: {names}")
        assert names == ["edge", "holonomic", "screw", "umbilical"]

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="Please choose from"):
            get_coframe("twist")

    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            get_coframe("screw", {"beta": 0.1})

    def test_screw_components(self):
        screw = get_coframe("SCREW", {"b0": 0.2})
        e = screw.components(np.array([[0.5, 0.0, 0.0]]))
        assert e[0, 2, 1] == pytest.approx(0.1)
        assert screw.describe() == {"name": "screw", "params": {"b0": 0.2}}
        assert screw.has_partials


class TestExpressionCoframe:
    """Tests for coframes given as expression strings"""

    def test_matches_builtin(self, lattice):
        expression = ExpressionCoframe([["1", "0", "0"], ["0", "1", "0"], ["0", "0.1*X1", "1"]])
        screw = get_coframe("screw", {"b0": 0.1})
        assert np.max(np.abs(expression.components(lattice) - screw.components(lattice))) < 1e-14
        assert not expression.has_partials

    def test_time_parameter(self):
        coframe = ExpressionCoframe([["exp(-t)", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
        later = coframe.at_time(1.0)
        assert later.components(np.zeros((1, 3)))[0, 0, 0] == pytest.approx(np.exp(-1.0))

    @pytest.mark.parametrize("text", ["Y1", "tan(X1)", "X1 +", "2*I"])
    def test_rejected_expressions(self, text):
        with pytest.raises(ConfigParseError):
            ExpressionCoframe([[text, "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])

    def test_table_shape(self):
        with pytest.raises(ConfigParseError):
            ExpressionCoframe([["1", "0"], ["0", "1"]])


class TestFrameBundle:
    """Tests for the moving frame, metric and volume form of a coframe"""

    @pytest.mark.parametrize("name", ["holonomic", "screw", "edge", "umbilical"])
    def test_builtin_invariants(self, name, bundle_factory, lattice):
        bundle = bundle_factory(name)
        duality = bundle.frame.duality_residual(lattice)
        compatibility = bundle.metric.compatibility_residual(lattice)
        volume = np.max(np.abs(bundle.sqrt_g.evaluate(lattice) / bundle.metric.sqrt_det(lattice) - 1.0))
        logger.info(f"{name}: duality {duality:.2e}, ∇g {compatibility:.2e}, volume {volume:.2e}")

        assert duality < settings.tol("duality")
        assert compatibility < settings.tol("christoffel")
        assert volume < settings.tol("duality")

    def test_frame_coordinates_round_trip(self, bundle_factory, lattice):
        frame = bundle_factory("umbilical").frame
        components = np.broadcast_to([0.3, -0.2, 0.9], lattice.shape)
        coordinates = frame.to_coordinates(lattice, components)
        assert np.max(np.abs(frame.to_frame(lattice, coordinates) - components)) < 1e-12

    def test_frame_partials_match_stencils(self, bundle_factory):
        frame = bundle_factory("umbilical").frame
        p = np.array([0.1, -0.2, 0.3])
        h = 1e-4
        numeric = (frame.frame_at(p + [0.0, 0.0, h]) - frame.frame_at(p - [0.0, 0.0, h])) / (2 * h)
        assert np.max(np.abs(frame.frame_partials(p)[..., 2] - numeric)) < 1e-7

    def test_volume_form_components(self, bundle_factory):
        bundle = bundle_factory("umbilical")
        p = np.array([0.0, 0.0, 0.4])
        omega = bundle.volume_form.evaluate(p)
        assert omega[0, 1, 2] == pytest.approx(np.exp(-0.4))
        assert omega[1, 0, 2] == pytest.approx(-np.exp(-0.4))

    def test_gridded_coframe(self, unit_chart):
        coframe = get_coframe("screw", {"b0": 0.1}).to_field(unit_chart, gridded=True)
        assert isinstance(coframe, GriddedField)
        bundle = build_frame_bundle(coframe)
        assert bundle.frame.duality_residual(unit_chart.test_lattice()) < settings.tol("duality")

    def test_mirror_coframe(self, unit_chart):
        mirror = ExpressionCoframe([["-1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
        with pytest.raises(SingularCoframe, match="negatively oriented"):
            build_frame_bundle(mirror.to_field(unit_chart))

    def test_singular_coframe(self, unit_chart):
        singular = ExpressionCoframe([["1", "0", "0"], ["1", "0", "0"], ["0", "0", "1"]])
        with pytest.raises(SingularCoframe) as excinfo:
            build_frame_bundle(singular.to_field(unit_chart))
        assert "coframe duality" in excinfo.value.relation

    def test_epsilon(self, bundle_factory):
        frame = bundle_factory("screw").frame
        assert frame.with_epsilon(-1).epsilon == -1
        with pytest.raises(ValueError):
            frame.with_epsilon(0)

    def test_flat_metric(self, unit_chart, lattice):
        flat = MetricField.flat(unit_chart)
        assert tensors.max_abs(flat.christoffel(lattice)) == 0.0
        assert np.allclose(flat.sqrt_det(lattice), 1.0)


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
