"""Moving frame, intrinsic metric and volume form built from a coframe."""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from src.config import settings
from src.exceptions import SingularCoframe, SingularMetric
from src.geometry.chart import Chart
from src.geometry.fields import AnalyticField, Field
from src.utils import tensors

logger = logging.getLogger(__name__)


class FrameField(Field):
    """Frame components e_a^A = (e⁻¹)^A_a of a coframe field.

    Partials follow exactly from the coframe's: ∂_B(e⁻¹) = −e⁻¹(∂_B e)e⁻¹.
    """

    def __init__(self, coframe: Field):
        super().__init__(coframe.chart, (3, 3), ("d", "u"), name=f"frame of {coframe.name}")
        self.coframe = coframe

    def evaluate(self, points) -> np.ndarray:
        return np.swapaxes(np.linalg.inv(self.coframe.evaluate(points)), -1, -2)

    def jacobian(self, points) -> np.ndarray:
        inv = np.linalg.inv(self.coframe.evaluate(points))
        de = self.coframe.jacobian(points)
        d_inv = -np.einsum("...Ab,...bCB,...Ca->...AaB", inv, de, inv)
        return np.swapaxes(d_inv, -2, -3)


class MovingFrame:
    """Bravais moving frame: coframe E^a = e^a_A dX^A, its dual frame E_a = e_a^A ∂_A and ε.

    Frame-indexed vectors convert to coordinates with ``v^A = v^a e_a^A`` and back
    with ``v^a = e^a_A v^A``.
    """

    def __init__(self, coframe: Field, epsilon: int = 1, name: str = ""):
        if epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {epsilon}")
        self.coframe = coframe
        self.frame = FrameField(coframe)
        self.epsilon = epsilon
        self.chart = coframe.chart
        self.name = name or coframe.name

    def coframe_at(self, points) -> np.ndarray:
        return self.coframe.evaluate(points)

    def frame_at(self, points) -> np.ndarray:
        return self.frame.evaluate(points)

    def coframe_partials(self, points) -> np.ndarray:
        return self.coframe.jacobian(points)

    def frame_partials(self, points) -> np.ndarray:
        return self.frame.jacobian(points)

    def to_coordinates(self, points, frame_components) -> np.ndarray:
        return np.einsum("...a,...aA->...A", frame_components, self.frame_at(points))

    def to_frame(self, points, coordinate_components) -> np.ndarray:
        return np.einsum("...aA,...A->...a", self.coframe_at(points), coordinate_components)

    def duality_residual(self, points) -> float:
        """max |e^a_A e_b^A − δ^a_b|."""
        product = np.einsum("...aA,...bA->...ab", self.coframe_at(points), self.frame_at(points))
        return tensors.max_abs(product - np.eye(3))

    def with_epsilon(self, epsilon: int) -> "MovingFrame":
        return MovingFrame(self.coframe, epsilon, self.name)


class MetricField:
    """Riemannian metric g_AB over a chart with its Christoffel symbols.

    Args:
        g: Symmetric rank-2 field with lower indices and partials.
        name: Label used in logs and reports.
    """

    def __init__(self, g: Field, name: str = ""):
        if g.shape != (3, 3):
            raise ValueError(f"metric must have shape (3, 3), got {g.shape}")
        self.g = g
        self.chart = g.chart
        self.name = name or g.name

    @classmethod
    def from_coframe(cls, coframe: Field) -> "MetricField":
        """g_AB = δ_ab e^a_A e^b_B with exact partials from the coframe's."""

        def metric(points):
            e = coframe.evaluate(points)
            return np.einsum("...aA,...aB->...AB", e, e)

        def partials(points):
            e = coframe.evaluate(points)
            de = coframe.jacobian(points)
            first = np.einsum("...aAC,...aB->...ABC", de, e)
            return first + np.swapaxes(first, -2, -3)

        field = AnalyticField(coframe.chart, metric, shape=(3, 3), derivative=partials,
                              variance=("d", "d"), name=f"metric of {coframe.name}", validate=False)
        return cls(field)

    @classmethod
    def from_function(cls, chart: Chart, metric, partials=None, name: str = "metric") -> "MetricField":
        return cls(AnalyticField(chart, metric, shape=(3, 3), derivative=partials,
                                 variance=("d", "d"), name=name))

    @classmethod
    def flat(cls, chart: Chart) -> "MetricField":
        return cls(AnalyticField.constant(chart, np.eye(3), variance=("d", "d"), name="flat metric"))

    def metric(self, points) -> np.ndarray:
        return self.g.evaluate(points)

    def partials(self, points) -> np.ndarray:
        """∂_C g_AB with C last."""
        return self.g.jacobian(points)

    def inverse(self, points) -> np.ndarray:
        return np.linalg.inv(self.checked_metric(points))

    def checked_metric(self, points) -> np.ndarray:
        g = self.metric(points)
        asymmetry = tensors.max_abs(g - np.swapaxes(g, -1, -2))
        if asymmetry > 1e-12 * max(1.0, tensors.max_abs(g)):
            raise SingularMetric(f"{self.name}: g_AB − g_BA = {asymmetry:.3e}")
        lowest = float(np.min(np.linalg.eigvalsh(g)))
        if lowest <= 0:
            raise SingularMetric(f"{self.name}: smallest eigenvalue {lowest:.3e}")
        return g

    def sqrt_det(self, points) -> np.ndarray:
        return np.sqrt(np.linalg.det(self.checked_metric(points)))

    def christoffel(self, points) -> np.ndarray:
        """Γ^A_BC = ½ g^{AD}(∂_B g_DC + ∂_C g_DB − ∂_D g_BC), shape ``(..., 3, 3, 3)``."""
        g_inv = self.inverse(points)
        dg = self.partials(points)
        lowered = np.swapaxes(dg, -1, -2) + dg - np.moveaxis(dg, -1, -3)
        return 0.5 * np.einsum("...AD,...DBC->...ABC", g_inv, lowered)

    @cached_property
    def christoffel_field(self) -> Field:
        return AnalyticField(self.chart, self.christoffel, shape=(3, 3, 3), variance=("u", "d", "d"),
                             name=f"Christoffels of {self.name}")

    @cached_property
    def sqrt_det_field(self) -> Field:
        return AnalyticField(self.chart, self.sqrt_det, name=f"√g of {self.name}")

    @cached_property
    def lattice_christoffels(self) -> np.ndarray:
        """Christoffels on the chart's test lattice, computed once."""
        return self.christoffel(self.chart.test_lattice())

    def compatibility_residual(self, points) -> float:
        """max |∇_C g_AB| = |∂_C g_AB − Γ^D_CA g_DB − Γ^D_CB g_AD|."""
        g = self.metric(points)
        dg = self.partials(points)
        gamma = self.christoffel(points)
        nabla = (dg - np.einsum("...DCA,...DB->...ABC", gamma, g)
                 - np.einsum("...DCB,...AD->...ABC", gamma, g))
        return tensors.max_abs(nabla)


@dataclass
class FrameBundle:
    """Frame, metric and volume form built together from one coframe."""
    frame: MovingFrame
    metric: MetricField
    volume_form: Field
    sqrt_g: Field

    @property
    def chart(self) -> Chart:
        return self.frame.chart


def build_frame_bundle(coframe: Field, epsilon: int = 1, name: str = "",
                       lattice: Optional[np.ndarray] = None) -> FrameBundle:
    """Invert a coframe, build g_AB = δ_ab e^a_A e^b_B and ω_g = E¹∧E²∧E³.

    Raises:
        SingularCoframe: |det e| < 10⁻¹⁰ on the test lattice, a mirror frame
            (det e < 0) or a duality residual above tolerance.
    """
    chart = coframe.chart
    lattice = chart.test_lattice() if lattice is None else lattice
    e = coframe.evaluate(lattice)
    det = np.linalg.det(e)
    worst = int(np.argmin(np.abs(det)))
    if abs(det[worst]) < 1e-10:
        raise SingularCoframe(f"det e = {det[worst]:.3e} at {lattice[worst].tolist()}")
    if np.any(det < 0):
        bad = lattice[int(np.argmin(det))]
        raise SingularCoframe(f"negatively oriented coframe at {bad.tolist()}")

    frame = MovingFrame(coframe, epsilon, name)
    duality = frame.duality_residual(lattice)
    if duality > settings.tol("duality"):
        raise SingularCoframe(f"duality residual {duality:.3e}")

    metric = MetricField.from_coframe(coframe)

    def density(points):
        return np.linalg.det(coframe.evaluate(points))

    def form(points):
        return density(points)[..., None, None, None] * tensors.LEVI_CIVITA

    sqrt_g = AnalyticField(chart, density, name="√g")
    volume_form = AnalyticField(chart, form, shape=(3, 3, 3), variance=("d", "d", "d"), name="ω_g")

    mismatch = tensors.max_abs(density(lattice) / metric.sqrt_det(lattice) - 1.0)
    if mismatch > settings.tol("duality"):
        logger.warning(f"{frame.name}: det e and √det g differ by relative {mismatch:.3e}")
    logger.info(f"Built frame bundle for {frame.name} (ε={epsilon}, duality residual {duality:.2e})")
    return FrameBundle(frame, metric, volume_form, sqrt_g)


def levi_civita_covariant(g: MetricField, v: Field, u: Field, p) -> np.ndarray:
    """(∇^g_u v)^A = u^B ∂_B v^A + Γ^A_BC u^B v^C at ``p``.

    Raises:
        SingularMetric: g not positive-definite at ``p``.
    """
    p = np.asarray(p, dtype=float)
    u_p = u.evaluate(p)
    v_p = v.evaluate(p)
    gamma = g.christoffel(p)
    return (np.einsum("...AB,...B->...A", v.jacobian(p), u_p)
            + np.einsum("...ABC,...B,...C->...A", gamma, u_p, v_p))
