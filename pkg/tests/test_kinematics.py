#!/usr/bin/env python3
"""
Kinematics tests: closures, time evolution of κ, ϑ, ζ, ω and the static congruence.
"""

import logging
import math
import sys

import numpy as np
import pytest

from src.config import settings
from src.congruence.kinematics import (Closure, KinematicProfile, consistency_residual, evolve_kinematics,
                                       integrate_static_congruence, static_congruence_solution)
from src.exceptions import ClosureMissing, CurvatureCollapse, NonPositiveCurvature

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)]
)
logger = logging.getLogger(__name__)

RIGHT_ANGLE = math.pi / 2


def constant(value):
    return lambda s, t: np.full(np.shape(s), value)


@pytest.fixture
def arclength() -> np.ndarray:
    return np.linspace(0.0, 10.0, 129)


@pytest.fixture
def periodic_arclength() -> np.ndarray:
    return np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)


class TestStaticCongruence:
    """Closed form and RK4 integration of the static congruence"""

    @pytest.mark.parametrize("orientation", [1, -1])
    def test_integration_matches_closed_form(self, orientation):
        s, omega, zeta = integrate_static_congruence(1.5, 0.5, 0.2, 4.0, 0.01, orientation)
        omega_exact, zeta_exact = static_congruence_solution(1.5, 0.5, 0.2, s, orientation)
        logger.info(f"Static congruence, orientation {orientation}: ω(4) = {omega[-1]:.10f}")

        assert s[-1] == pytest.approx(4.0)
        assert np.max(np.abs(omega - omega_exact)) < settings.tol("static_congruence")
        assert np.max(np.abs(zeta - zeta_exact)) < settings.tol("static_congruence")
        assert np.max(np.abs(np.hypot(omega, zeta) - math.hypot(0.5, 0.2))) < settings.tol("static_congruence")

    def test_default_orientation(self):
        s = np.array([0.3])
        omega, zeta = static_congruence_solution(2.0, 0.5, 0.2, s)
        assert omega[0] == pytest.approx(0.5 * math.cos(0.6) + 0.2 * math.sin(0.6))
        assert zeta[0] == pytest.approx(-0.5 * math.sin(0.6) + 0.2 * math.cos(0.6))

    def test_non_positive_curvature(self):
        with pytest.raises(NonPositiveCurvature):
            static_congruence_solution(0.0, 0.5, 0.0, [0.0, 1.0])
        with pytest.raises(NonPositiveCurvature):
            integrate_static_congruence(-1.0, 0.5, 0.0, 1.0, 0.1)

    def test_orientation_value(self):
        with pytest.raises(ValueError):
            static_congruence_solution(1.0, 0.5, 0.0, [0.0], orientation=0)


class TestProfile:
    """Validation of kinematic profiles"""

    def test_needs_five_samples(self):
        with pytest.raises(ValueError):
            KinematicProfile.initial(np.linspace(0.0, 1.0, 4), 1.0, 0.0)

    def test_non_positive_curvature(self, arclength):
        with pytest.raises(CurvatureCollapse):
            KinematicProfile.initial(arclength, 0.0, 0.0)

    def test_single_slice_rate_residuals_are_nan(self, periodic_arclength):
        profile = KinematicProfile.initial(periodic_arclength, 1.0, 0.3)
        r1, r2, r3 = consistency_residual(profile, 0)
        assert r1 == pytest.approx(0.0, abs=1e-12)
        assert math.isnan(r2) and math.isnan(r3)


class TestEvolution:
    """Method-of-lines evolution under the four closures"""

    def test_theta_closure_keeps_static_congruence(self, arclength):
        initial = KinematicProfile.initial(arclength, 1.0, RIGHT_ANGLE, zeta=0.0, omega=0.5, periodic=False)
        profile = evolve_kinematics(initial, Closure("theta", constant(RIGHT_ANGLE)), steps=20, dt=0.01)
        omega_exact, zeta_exact = static_congruence_solution(1.0, 0.5, 0.0, arclength, orientation=1)
        logger.info(f"θ-closed residuals: {profile.residuals}")

        assert profile.kappa.shape == (21, len(arclength))
        assert np.max(np.abs(profile.omega[0] - omega_exact)) < 1e-4
        assert np.max(np.abs(profile.zeta[0] - zeta_exact)) < 1e-4
        assert np.max(np.abs(profile.kappa - profile.kappa[0])) < settings.tol("kappa_drift")
        for name in ("r1", "r2", "r3"):
            assert profile.residuals[name] < settings.tol("kinematic_consistency")

    def test_omega_closure(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 1.0)
        profile = evolve_kinematics(initial, Closure("omega", constant(0.5)), steps=10, dt=0.01)

        assert profile.closure == "omega"
        assert not profile.is_complex
        assert np.max(np.abs(profile.kappa - 1.0)) < 1e-12
        assert len(list(profile.rows())) == 11 * len(periodic_arclength)

    def test_complex_branch(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.0)
        closure = Closure("omega", constant(0.1 + 0.2j))
        profile = evolve_kinematics(initial, closure, steps=5, dt=0.01, complex_branch=True)

        assert profile.is_complex
        assert set(profile.residuals) == {"r1", "r2"}
        assert np.all(profile.kappa > 0)
        assert {"re_omega", "im_omega"} <= set(next(profile.rows()))

    def test_curvature_collapse(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.5)
        with pytest.raises(CurvatureCollapse):
            evolve_kinematics(initial, Closure("kappa", lambda s, t: np.full(np.shape(s), 1.0 - 200.0 * t)),
                              steps=1, dt=0.01)

    def test_step_validation(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.5)
        with pytest.raises(ValueError):
            evolve_kinematics(initial, Closure("omega", constant(0.0)), steps=0, dt=0.01)


class TestClosures:
    """The system needs exactly one prescribed variable"""

    def test_missing_closure(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.5)
        with pytest.raises(ClosureMissing):
            evolve_kinematics(initial, None, steps=1, dt=0.01)

    def test_unknown_variable(self):
        with pytest.raises(ClosureMissing):
            Closure("speed", constant(1.0))

    def test_closure_must_be_callable(self):
        with pytest.raises(ClosureMissing):
            Closure("omega", 1.0)

    def test_complex_branch_needs_omega(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.5)
        with pytest.raises(ClosureMissing):
            evolve_kinematics(initial, Closure("theta", constant(0.5)), steps=1, dt=0.01, complex_branch=True)

    def test_zeta_closure_needs_sine(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.0)
        with pytest.raises(ClosureMissing, match="κ sin ϑ"):
            evolve_kinematics(initial, Closure("zeta", constant(0.2)), steps=1, dt=0.01)

    def test_kappa_closure_needs_cosine(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, RIGHT_ANGLE)
        with pytest.raises(ClosureMissing, match="cos ϑ"):
            evolve_kinematics(initial, Closure("kappa", constant(1.0)), steps=1, dt=0.01)

    def test_theta_closure_needs_sine(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 0.0)
        with pytest.raises(ClosureMissing, match="sin ϑ"):
            evolve_kinematics(initial, Closure("theta", constant(0.0)), steps=1, dt=0.01)

    def test_closure_rate(self):
        closure = Closure("kappa", lambda s, t: 1.0 + s * t ** 2)
        s = np.array([0.5, 2.0])
        assert np.allclose(closure.rate(s, 1.0), 2.0 * s, atol=1e-9)


class TestConvergence:
    """Fourth-order accuracy of the arclength and time integrators"""

    def test_static_congruence_step_halving(self):
        errors = []
        for step in (0.2, 0.1):
            s, omega, zeta = integrate_static_congruence(1.0, 0.5, 0.2, 4.0, step)
            omega_exact, zeta_exact = static_congruence_solution(1.0, 0.5, 0.2, s)
            errors.append(np.max(np.hypot(omega - omega_exact, zeta - zeta_exact)))
        logger.info(f"Static congruence errors: {errors[0]:.3e} -> {errors[1]:.3e}")

        assert errors[0] / errors[1] >= 8.0

    def test_time_step_halving(self, periodic_arclength):
        initial = KinematicProfile.initial(periodic_arclength, 1.0, 1.0)
        closure = Closure("omega", lambda s, t: 0.3 * np.sin(s + t))
        finals = []
        for steps in (10, 20, 40):
            profile = evolve_kinematics(initial, closure, steps=steps, dt=1.0 / steps)
            finals.append(np.concatenate([profile.kappa[-1], profile.theta[-1]]))
        coarse = np.max(np.abs(finals[0] - finals[1]))
        fine = np.max(np.abs(finals[1] - finals[2]))
        logger.info(f"Successive differences at t = 1: {coarse:.3e} -> {fine:.3e}")

        assert fine < coarse
        assert coarse / fine >= 8.0


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
