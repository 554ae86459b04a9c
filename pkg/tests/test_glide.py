#!/usr/bin/env python3
"""
Glide tests: umbilical material spaces, slip systems, Orowan relations and dissipation.
"""

import logging
import math
import sys

import numpy as np
import pytest
from pydantic import ValidationError

from src.config import settings
from src.exceptions import NegativeStress, NonPositiveLeafMetric, NonPositiveSpeed, NotInextensible
from src.geometry.fields import AnalyticField
from src.glide import (LeafMetric, StressInput, build_umbilical_space, classify_curvature,
                       dislocation_speed_power_law, dissipation_check, killing_residual, orowan_rate,
                       resolved_shear_stress, shear_relation, slip_system, stress_gradient_condition)

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)

L, M, N = np.eye(3)


def _sym(u, v):
    return np.outer(u, v) + np.outer(v, u)


class TestUmbilicalSpace:
    """Foliations by umbilical leaves"""

    def test_flat_leaves(self, unit_chart):
        space = build_umbilical_space(0.5, "flat", unit_chart)
        p = np.array([0.2, -0.1, 0.4])

        assert space.christoffel_residual() < settings.tol("christoffel")
        assert space.H(p[2]) == pytest.approx(0.5)
        assert space.psi(p[2]) == pytest.approx(math.exp(-0.4))
        assert space.normal_curvature(p, [1.0, 0.0, 0.0]) == pytest.approx(0.5, abs=1e-10)
        assert space.normal_curvature(p, [0.3, 0.7, 0.0]) == pytest.approx(0.5, abs=1e-10)
        assert space.gaussian_curvature().label == "parabolic"

    def test_sphere_leaves(self, unit_chart):
        space = build_umbilical_space(0.0, "sphere", unit_chart)
        curvature = space.gaussian_curvature()
        logger.info(f"Sphere leaves: {curvature.to_dict()}")

        assert space.christoffel_residual() < settings.tol("christoffel")
        assert np.max(np.abs(curvature.K_leaf - 1.0)) < 1e-6
        assert curvature.label == "elliptic"

    def test_rescaled_leaf_curvature(self, unit_chart):
        space = build_umbilical_space(0.5, "sphere", unit_chart)
        points = np.array([[0.1, 0.2, -0.5], [0.1, 0.2, 0.5]])
        curvature = space.gaussian_curvature(points)
        assert np.allclose(curvature.K_c, np.exp(points[:, 2]), atol=1e-6)

    def test_coframe_reproduces_metric(self, unit_chart, lattice):
        space = build_umbilical_space(0.5, "sphere", unit_chart)
        e = space.coframe().evaluate(lattice)
        assert np.max(np.abs(np.einsum("...aA,...aB->...AB", e, e) - space.g(lattice))) < 1e-12

    def test_non_positive_leaf_metric(self, unit_chart):
        with pytest.raises(NonPositiveLeafMetric):
            build_umbilical_space(0.5, [[1.0, 0.0], [0.0, -1.0]], unit_chart)

    def test_normal_curvature_needs_tangent(self, unit_chart):
        space = build_umbilical_space(0.5, "flat", unit_chart)
        with pytest.raises(ValueError):
            space.normal_curvature([0.0, 0.0, 0.0], [0.0, 0.0, 1.0])

    @pytest.mark.parametrize("K, label", [
        ([0.0, 1e-12], "parabolic"),
        ([1.0, 2.0], "elliptic"),
        ([-1.0, -2.0], "hyperbolic"),
        ([-1.0, 1.0], "indefinite"),
    ])
    def test_classify_curvature(self, K, label):
        assert classify_curvature(K) == label

    def test_killing_fields(self):
        flat = LeafMetric.flat()
        assert killing_residual(flat, lambda x: np.stack([-x[..., 1], x[..., 0]], -1)) < settings.tol("killing")
        stretch = killing_residual(flat, lambda x: np.stack([x[..., 0], np.zeros(x.shape[:-1])], -1))
        assert stretch == pytest.approx(2.0, abs=1e-8)

    def test_leaf_tangent_shear(self, unit_chart):
        space = build_umbilical_space(0.5, "flat", unit_chart)
        glide = AnalyticField.constant(unit_chart, [0.3, 0.0, 0.0])
        residuals = shear_relation(space, glide, [0.1, 0.2, 0.3], gamma_dot=0.0, S_g=1.0)
        assert residuals["stretching_block"] < 1e-8
        assert residuals["shear_direction"] < 1e-8


class TestSlipSystem:
    """Shear direction and slip normal of an inextensible D_g"""

    def test_pure_glide(self):
        system = slip_system(0.5 * _sym(M, N), (L, M, N))
        assert system.gamma_dot == pytest.approx(0.5)
        assert system.S_g == pytest.approx(1.0)
        assert system.psi_angle == pytest.approx(0.0)
        assert np.allclose(system.s, M)

    def test_inclined_shear_direction(self):
        system = slip_system(0.5 * _sym(M, N) + 0.5 * _sym(L, N), (L, M, N))
        logger.info(f"Slip system: {system.to_dict()}")

        assert system.delta_g == pytest.approx(1.0)
        assert system.S_g == pytest.approx(math.sqrt(2.0))
        assert system.psi_angle == pytest.approx(math.pi / 4)
        assert system.cos_psi == pytest.approx(1.0 / math.sqrt(2.0))
        assert np.allclose(system.s, (L + M) / math.sqrt(2.0))
        assert system.reconstruction_residual < 1e-12

    def test_extension_is_rejected(self):
        with pytest.raises(NotInextensible):
            slip_system(np.diag([1.0, 0.0, 0.0]), (L, M, N))

    def test_needs_shear_along_burgers_direction(self):
        with pytest.raises(ValueError):
            slip_system(_sym(L, N), (L, M, N))


class TestOrowan:
    """Orowan rates, the power-law speed and dissipation"""

    def test_variants(self):
        assert orowan_rate(2.0, 0.5, variant="aligned") == pytest.approx(1.0)
        assert orowan_rate(2.0, 0.5, math.pi / 3, variant="directional") == pytest.approx(0.5)
        assert orowan_rate(2.0, 0.9, variant="aligned", H=0.25) == pytest.approx(0.5)

    def test_rate_errors(self):
        with pytest.raises(NonPositiveSpeed):
            orowan_rate(0.0, 0.5)
        with pytest.raises(ValueError, match="Supported variants"):
            orowan_rate(1.0, 0.5, variant="bogus")
        with pytest.raises(ValueError):
            orowan_rate(1.0, 0.5, math.pi / 2, variant="directional")
        with pytest.raises(ValueError):
            orowan_rate(1.0)

    def test_power_law(self):
        stress = StressInput(T0=1.0, n_exp=3.0, v0=0.5)
        v_g, gamma_dot = dislocation_speed_power_law(2.0, stress, H=0.4)
        assert v_g == pytest.approx(4.0)
        assert gamma_dot == pytest.approx(1.6)
        assert dislocation_speed_power_law(2.0, stress) == (pytest.approx(4.0), None)

    def test_negative_stress(self):
        with pytest.raises(NegativeStress):
            dislocation_speed_power_law(-1.0, StressInput(T0=1.0, v0=1.0))

    def test_stress_input_validation(self, unit_chart):
        with pytest.raises(ValidationError):
            StressInput(T0=0.0, v0=1.0)
        with pytest.raises(ValidationError):
            StressInput(T0=1.0, v0=1.0, n_exp=0.5)
        with pytest.raises(ValidationError):
            StressInput(T0=1.0, v0=1.0, T=np.eye(3))
        field = AnalyticField.constant(unit_chart, np.eye(3))
        assert StressInput(T0=1.0, v0=1.0, T=field).T is field

    def test_dissipation(self):
        T = 0.3 * _sym(M, N)
        D_g = 0.5 * _sym(M, N)
        result = dissipation_check(T, D_g, m=M, n=N)

        assert resolved_shear_stress(T, M, N) == pytest.approx(0.3)
        assert result["value"] == pytest.approx(0.3)
        assert result["nonnegative"]
        assert result["identity_residual"] < settings.tol("dissipation_identity")
        assert not dissipation_check(T, -D_g)["nonnegative"]

    def test_dissipation_in_coordinates(self):
        frame = np.diag([0.5, 1.0, 2.0])
        coframe = np.linalg.inv(frame)
        T = frame @ (0.3 * _sym(M, N)) @ frame.T
        D_g = coframe.T @ (0.5 * _sym(M, N)) @ coframe
        result = dissipation_check(T, D_g)

        assert result["value"] == pytest.approx(0.3)
        assert result["nonnegative"]

    def test_stress_gradient_needs_positive_stress(self, unit_chart):
        space = build_umbilical_space(0.5, "flat", unit_chart)
        m = AnalyticField.constant(unit_chart, [0.0, 1.0, 0.0])
        with pytest.raises(NegativeStress, match="T > 0"):
            stress_gradient_condition(space, m, lambda p: np.zeros(np.shape(p)[:-1]), 1.0, [0.1, 0.1, 0.1])


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
