#!/usr/bin/env python3
"""
Geometry core tests: charts, fields, curves, quadrature and stencils.
"""

import logging
import math
import sys

import numpy as np
import pytest

from src.exceptions import (DegeneratePatch, FieldValidationError, PointOutsideChart, StencilOutOfRange,
                            VanishingField)
from src.geometry.chart import Chart
from src.geometry.curves import ParametricPatch, Polyline, integral_curve
from src.geometry.fields import AnalyticField, GriddedField, partial_derivative
from src.geometry.quadrature import line_integral, surface_integral, volume_integral
from src.utils import stencils

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)

UNIT_SQUARE = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])


def y_dx(points):
    points = np.asarray(points, dtype=float)
    zeros = np.zeros(points.shape[:-1])
    return np.stack([points[..., 1], zeros, zeros], axis=-1)


class TestChart:
    """Tests for the box chart and its seeded test lattice"""

    def test_rejects_inverted_box(self):
        with pytest.raises(ValueError):
            Chart((0.0, 0.0, 0.0), (1.0, -1.0, 1.0))

    def test_rejects_coarse_grid(self):
        with pytest.raises(ValueError):
            Chart((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (2, 8, 8))

    def test_lattice_is_seeded(self, unit_chart):
        first = unit_chart.test_lattice(seed=7)
        second = unit_chart.test_lattice(seed=7)
        other = unit_chart.test_lattice(seed=8)
        logger.info(f"Lattice of {len(first)} points")

        assert first.shape == (5 ** 3 + 16, 3)
        assert np.array_equal(first, second)
        assert not np.array_equal(first, other)
        assert np.all(unit_chart.contains(first))

    def test_require_inside(self, unit_chart):
        unit_chart.require_inside([[0.0, 0.0, 1.0]])
        with pytest.raises(PointOutsideChart):
            unit_chart.require_inside([[0.0, 0.0, 1.5]])

    def test_sub_box(self, unit_chart):
        lower, upper = unit_chart.sub_box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
        assert lower.tolist() == [0.0, 0.0, 0.0]
        with pytest.raises(ValueError):
            unit_chart.sub_box((0.5, 0.0, 0.0), (0.0, 1.0, 1.0))
        with pytest.raises(PointOutsideChart):
            unit_chart.sub_box((0.0, 0.0, 0.0), (2.0, 1.0, 1.0))


class TestFields:
    """Tests for analytic and gridded fields"""

    def test_analytic_partials_fall_back_to_stencils(self, unit_chart):
        field = AnalyticField(unit_chart, lambda p: p[..., 0] ** 2 * p[..., 1], name="x²y")
        partials = partial_derivative(field, 0, [0.3, 0.4, 0.0])
        assert partials == pytest.approx(2 * 0.3 * 0.4, abs=1e-9)

    def test_wrong_partials_are_rejected(self, unit_chart):
        with pytest.raises(FieldValidationError):
            AnalyticField(unit_chart, lambda p: p[..., 0] ** 2,
                          derivative=lambda p: np.zeros(np.shape(p)[:-1] + (3,)), name="x²")

    def test_evaluation_outside_chart(self, unit_chart):
        field = AnalyticField.constant(unit_chart, 1.0)
        with pytest.raises(PointOutsideChart):
            field.evaluate([2.0, 0.0, 0.0])

    def test_partial_derivative_axis(self, unit_chart):
        field = AnalyticField.constant(unit_chart, 1.0)
        with pytest.raises(ValueError):
            partial_derivative(field, 3, [0.0, 0.0, 0.0])

    def test_gridded_field_reproduces_cubics(self, unit_chart):
        cubic = AnalyticField(unit_chart, lambda p: p[..., 0] ** 3 + p[..., 1] ** 2 * p[..., 2], validate=False)
        gridded = GriddedField.sample(cubic)
        points = unit_chart.test_lattice(per_axis=3, n_random=8)
        # include the boundary, where the stencils turn one-sided
        points = np.concatenate([points, [[1.0, -1.0, 1.0], [-1.0, 0.3, -1.0]]])
        exact = np.stack([3.0 * points[:, 0] ** 2, 2.0 * points[:, 1] * points[:, 2], points[:, 1] ** 2], axis=-1)

        assert np.max(np.abs(gridded.evaluate(points) - cubic.evaluate(points))) < 1e-9
        assert np.max(np.abs(gridded.jacobian(points) - exact)) < 1e-9

    def test_gridded_shape_mismatch(self, unit_chart):
        with pytest.raises(ValueError):
            GriddedField(unit_chart, np.zeros((4, 4, 4)))


class TestStencils:
    """Tests for the fourth-order stencils"""

    def test_stencil_position(self):
        assert stencils.stencil_position(0.0, 8) == 0
        assert stencils.stencil_position(1.0, 8) == 1
        assert stencils.stencil_position(4.0, 8) == 2
        assert stencils.stencil_position(8.0, 8) == 4

    def test_short_lattice(self):
        with pytest.raises(StencilOutOfRange):
            stencils.lattice_derivative(np.zeros(4), 0.1, periodic=False)

    def test_lattice_derivative_of_quartic(self):
        s = np.linspace(0.0, 1.0, 11)
        derivative = stencils.lattice_derivative(s ** 4, 0.1, periodic=False)
        assert np.max(np.abs(derivative - 4.0 * s ** 3)) < 1e-12

    def test_periodic_derivative(self):
        s = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        derivative = stencils.lattice_derivative(np.sin(s), s[1] - s[0])
        assert np.max(np.abs(derivative - np.cos(s))) < 1e-4


class TestCurvesAndQuadrature:
    """Tests for polylines, patches, integral curves and quadrature"""

    def test_polyline_validation(self):
        with pytest.raises(ValueError):
            Polyline(np.zeros((1, 3)))
        square = Polyline(UNIT_SQUARE, closed=True)
        assert square.length == pytest.approx(4.0)
        assert square.segments().shape == (4, 2, 3)

    def test_line_integral_around_square(self, unit_chart):
        omega = AnalyticField(unit_chart, y_dx, shape=(3,), variance=("d",), validate=False)
        square = Polyline(UNIT_SQUARE, closed=True, chart=unit_chart)
        circulation = line_integral(omega, square)
        logger.info(f"∮ X² dX¹ = {circulation}")

        assert circulation == pytest.approx(-1.0, abs=1e-12)
        assert line_integral(omega, square.reversed()) == pytest.approx(1.0, abs=1e-12)

    def test_surface_integral_orientation(self, unit_chart):
        d_omega = AnalyticField.constant(unit_chart, [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
                                         variance=("d", "d"))
        patch = ParametricPatch.rectangle((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), chart=unit_chart)
        flipped = ParametricPatch.rectangle((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), orientation=-1,
                                            chart=unit_chart)

        assert surface_integral(d_omega, patch) == pytest.approx(-1.0, abs=1e-12)
        assert surface_integral(d_omega, flipped) == pytest.approx(1.0, abs=1e-12)
        assert np.array_equal(flipped.boundary().vertices, patch.boundary().vertices[::-1])

    def test_degenerate_patch(self, unit_chart):
        d_omega = AnalyticField.constant(unit_chart, np.zeros((3, 3)), variance=("d", "d"))
        patch = ParametricPatch.rectangle((0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (0.25, 0.0, 0.0))
        with pytest.raises(DegeneratePatch):
            surface_integral(d_omega, patch)

    def test_patch_orientation_value(self):
        with pytest.raises(ValueError):
            ParametricPatch.rectangle((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), orientation=0)

    def test_volume_integral(self):
        volume = volume_integral(lambda p: np.exp(-p[..., 2]), (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
        assert volume == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)

    def test_integral_curve_closes(self):
        chart = Chart.cube(2.0, cells=8)
        rotation = AnalyticField(chart, lambda p: np.stack([-p[..., 1], p[..., 0], np.zeros(p.shape[:-1])], -1),
                                 shape=(3,), validate=False)
        curve = integral_curve(rotation, (1.0, 0.0, 0.0), 2.0 * math.pi, 0.01)

        assert not curve.exited
        assert np.max(np.abs(curve.endpoint - curve.points[0])) < 1e-6
        assert curve.parameters[-1] == pytest.approx(2.0 * math.pi)

    def test_integral_curve_fourth_order(self):
        chart = Chart.cube(2.0, cells=8)
        rotation = AnalyticField(chart, lambda p: np.stack([-p[..., 1], p[..., 0], np.zeros(p.shape[:-1])], -1),
                                 shape=(3,), validate=False)
        exact = np.array([math.cos(2.0), math.sin(2.0), 0.0])
        coarse = np.linalg.norm(integral_curve(rotation, (1.0, 0.0, 0.0), 2.0, 0.2).endpoint - exact)
        fine = np.linalg.norm(integral_curve(rotation, (1.0, 0.0, 0.0), 2.0, 0.1).endpoint - exact)
        logger.info(f"RK4 endpoint errors: {coarse:.3e} -> {fine:.3e}")

        assert fine < coarse
        assert coarse / fine >= 8.0

    def test_integral_curve_exits(self, unit_chart):
        drift = AnalyticField.constant(unit_chart, [1.0, 0.0, 0.0])
        curve = integral_curve(drift, (0.0, 0.0, 0.0), 5.0, 0.05)

        assert curve.exited
        assert "exited chart" in curve.notes
        assert np.all(unit_chart.contains(curve.points))

    def test_vanishing_field(self, unit_chart):
        still = AnalyticField.constant(unit_chart, [0.0, 0.0, 0.0])
        with pytest.raises(VanishingField):
            integral_curve(still, (0.0, 0.0, 0.0), 1.0, 0.1)


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
