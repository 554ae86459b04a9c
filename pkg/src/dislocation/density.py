"""Anholonomy, torsion and the dislocation density tensor of a moving frame.

All frame-indexed arrays put point axes first: ``C[..., a, b, c] = C_ab^c``,
``alpha[..., b, a] = α^{ba}``, ``t[..., a] = t_a``.
"""
import logging
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.exceptions import NonPositiveDensity, ReconstructionFailure
from src.frames.bundle import MetricField, MovingFrame
from src.geometry.chart import Chart
from src.geometry.fields import AnalyticField, Field, derived_field
from src.geometry.quadrature import volume_integral
from src.utils import tensors

logger = logging.getLogger(__name__)


class AnholonomyObject:
    """Structure coefficients [E_a, E_b] = C_ab^c E_c of a moving frame."""

    def __init__(self, frame: MovingFrame):
        self.frame = frame

    def at(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        F = self.frame.frame_at(points)
        dF = self.frame.frame_partials(points)
        half = np.einsum("...aB,...bAB->...abA", F, dF)
        bracket = half - np.swapaxes(half, -2, -3)
        return np.einsum("...cA,...abA->...abc", self.frame.coframe_at(points), bracket)

    def bracket(self, points) -> np.ndarray:
        """[E_a, E_b]^A in coordinate components."""
        return np.einsum("...abc,...cA->...abA", self.at(points), self.frame.frame_at(points))

    @cached_property
    def field(self) -> Field:
        return derived_field(self.frame.chart, self.at, (3, 3, 3), ("d", "d", "u"), name="C_ab^c")

    def antisymmetry_residual(self, points) -> float:
        C = self.at(points)
        return tensors.max_abs(C + np.swapaxes(C, -2, -3))


def anholonomy(frame: MovingFrame) -> AnholonomyObject:
    return AnholonomyObject(frame)


class TorsionTensor:
    """S_ab^c = −½ C_ab^c with the exterior derivatives dE^a of the coframe."""

    def __init__(self, frame: MovingFrame):
        self.frame = frame
        self.anholonomy = AnholonomyObject(frame)

    def at(self, points) -> np.ndarray:
        return -0.5 * self.anholonomy.at(points)

    def exterior_derivatives(self, points) -> np.ndarray:
        """(dE^a)_AB = ∂_A e^a_B − ∂_B e^a_A, shape ``(..., 3, 3, 3)``."""
        de = self.frame.coframe_partials(points)
        return np.swapaxes(de, -1, -2) - de

    def structure_from_forms(self, points) -> np.ndarray:
        """C_ab^c = −dE^c(E_a, E_b), independent of the bracket computation."""
        F = self.frame.frame_at(points)
        return -np.einsum("...cAB,...aA,...bB->...abc", self.exterior_derivatives(points), F, F)

    @cached_property
    def field(self) -> Field:
        return derived_field(self.frame.chart, self.at, (3, 3, 3), ("d", "d", "u"), name="S_ab^c")

    @cached_property
    def forms(self) -> Field:
        """The three 2-forms dE^a as one field with the coframe index first."""
        return derived_field(self.frame.chart, self.exterior_derivatives, (3, 3, 3), ("u", "d", "d"),
                             name="dE^a")


def torsion_tensor(frame: MovingFrame) -> TorsionTensor:
    return TorsionTensor(frame)


def reconstruct_alpha(gamma: np.ndarray, t: np.ndarray) -> np.ndarray:
    """α^{ab} = γ^{ab} + ½ t_c e^{cab}."""
    return gamma + tensors.axial_to_antisymmetric(t)


class DislocationDensity:
    """α^{ba} = ε S_cd^a e^{cdb} with its symmetric part γ and axial vector t."""

    def __init__(self, frame: MovingFrame, epsilon: Optional[int] = None):
        self.frame = frame
        self.epsilon = frame.epsilon if epsilon is None else epsilon
        self.torsion = TorsionTensor(frame)

    @property
    def chart(self) -> Chart:
        return self.frame.chart

    def alpha(self, points) -> np.ndarray:
        S = self.torsion.at(points)
        return self.epsilon * np.einsum("...cda,cdb->...ba", S, tensors.LEVI_CIVITA)

    def gamma(self, points) -> np.ndarray:
        return tensors.symmetric_part(self.alpha(points))

    def t(self, points) -> np.ndarray:
        """t_a = e_abc α^{bc}."""
        return np.einsum("abc,...bc->...a", tensors.LEVI_CIVITA, self.alpha(points))

    def sigma(self, points) -> np.ndarray:
        return tensors.axial_to_antisymmetric(self.t(points))

    def decompose(self, points) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(α, γ, t) at once."""
        alpha = self.alpha(points)
        t = np.einsum("abc,...bc->...a", tensors.LEVI_CIVITA, alpha)
        return alpha, tensors.symmetric_part(alpha), t

    def round_trip_residual(self, points) -> float:
        alpha, gamma, t = self.decompose(points)
        return tensors.max_abs(reconstruct_alpha(gamma, t) - alpha)

    def trace_identity_residual(self, points) -> float:
        """max |t_a − ε C_ab^b| against the form-based structure coefficients."""
        C = self.torsion.structure_from_forms(points)
        return tensors.max_abs(self.t(points) - self.epsilon * np.einsum("...abb->...a", C))

    def reconstruction_residual(self, points) -> float:
        """max |εC_ab^c − t_[a δ_b]^c + e_abd γ^{dc}|."""
        C = self.torsion.anholonomy.at(points)
        _, gamma, t = self.decompose(points)
        delta = np.eye(3)
        wedge = 0.5 * (np.einsum("...a,bc->...abc", t, delta) - np.einsum("...b,ac->...abc", t, delta))
        rhs = wedge - np.einsum("abd,...dc->...abc", tensors.LEVI_CIVITA, gamma)
        return tensors.max_abs(self.epsilon * C - rhs)

    @cached_property
    def alpha_field(self) -> Field:
        return derived_field(self.chart, self.alpha, (3, 3), name="α^{ab}")

    @cached_property
    def gamma_field(self) -> Field:
        return derived_field(self.chart, self.gamma, (3, 3), name="γ^{ab}")

    @cached_property
    def t_field(self) -> Field:
        return derived_field(self.chart, self.t, (3,), ("d",), name="t_a")


def dislocation_tensor(frame: MovingFrame, epsilon: Optional[int] = None,
                       lattice: Optional[np.ndarray] = None) -> DislocationDensity:
    """Build α, γ and t and check the torsion reconstruction on the test lattice.

    Raises:
        ReconstructionFailure: εC_ab^c = t_[a δ_b]^c − e_abd γ^{dc} fails by more
            than the reconstruction tolerance.
    """
    density = DislocationDensity(frame, epsilon)
    lattice = frame.chart.test_lattice() if lattice is None else lattice
    residual = density.reconstruction_residual(lattice)
    if residual > settings.tol("reconstruction"):
        raise ReconstructionFailure(f"{frame.name}: residual {residual:.3e} on the test lattice")
    logger.info(f"Dislocation density of {frame.name} (ε={density.epsilon}): reconstruction residual {residual:.2e}")
    return density


def is_holonomic(frame: MovingFrame, tol: float, lattice: Optional[np.ndarray] = None) -> Tuple[bool, float]:
    """(max|S| < tol, max|S|) over the test lattice."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    lattice = frame.chart.test_lattice() if lattice is None else lattice
    worst = tensors.max_abs(torsion_tensor(frame).at(lattice))
    return worst < tol, worst


class ScalarDensitySpec:
    """Scalar dislocation density ρ > 0 in cm⁻²."""

    def __init__(self, rho: Field, check_points: Optional[np.ndarray] = None):
        if rho.shape != ():
            raise ValueError(f"rho must be a scalar field, got shape {rho.shape}")
        self.rho = rho
        points = rho.chart.test_lattice() if check_points is None else check_points
        self.require_positive(points)

    @classmethod
    def constant(cls, chart: Chart, value: float = 1.0) -> "ScalarDensitySpec":
        return cls(AnalyticField.constant(chart, float(value), name="ρ"))

    @property
    def chart(self) -> Chart:
        return self.rho.chart

    def require_positive(self, points) -> np.ndarray:
        values = self.rho.evaluate(points)
        if np.any(values <= 0):
            raise NonPositiveDensity(f"min ρ = {float(np.min(values)):.3e}")
        return values

    def evaluate(self, points) -> np.ndarray:
        return self.require_positive(points)


def total_line_length(rho: ScalarDensitySpec, g: MetricField, region: Sequence[Sequence[float]],
                      nodes: Optional[int] = None) -> float:
    """L = ∫_B ρ √g dX over a box ``region = (lower, upper)`` in cm."""
    lower, upper = g.chart.sub_box(*region)

    def integrand(points):
        return rho.evaluate(points) * g.sqrt_det(points)

    length = volume_integral(integrand, lower, upper, nodes)
    logger.debug(f"Total line length over {lower.tolist()}..{upper.tolist()}: {length:.6g} cm")
    return length
