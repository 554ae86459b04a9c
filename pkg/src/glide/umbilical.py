"""Umbilical material spaces g = Ψ(X³) a(X¹, X²) + dX³⊗dX³.

Ψ = a_scale² e^{−2h} with a_scale fixed by Ψ(0) = 1, so the leaves X³ = c
carry the conformally rescaled metrics Ψ(c)·a and are umbilical with
mean curvature H = ∂₃h.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np

from src.config import settings
from src.exceptions import NonPositiveLeafMetric
from src.frames.bundle import MetricField
from src.geometry.chart import Chart
from src.geometry.fields import AnalyticField, Field
from src.utils import stencils, tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)

LeafFunction = Callable[[np.ndarray], np.ndarray]
HeightFunction = Callable[[np.ndarray, float], np.ndarray]


class LeafMetric:
    """Two-dimensional metric a_αβ(X¹, X²) on the leaves.

    Args:
        func: Map from ``(..., 2)`` leaf points to ``(..., 2, 2)`` components.
        partials: Optional ∂_γ a_αβ with γ last; stencils otherwise.
        name: Label used in logs and reports.
    """

    def __init__(self, func: LeafFunction, partials: Optional[LeafFunction] = None, name: str = "a"):
        self._func = func
        self._partials = partials
        self.name = name
        self.fd_step = settings.numerics.fd_step

    @classmethod
    def flat(cls) -> "LeafMetric":
        return cls.constant(np.eye(2), name="flat")

    @classmethod
    def constant(cls, matrix, name: str = "constant") -> "LeafMetric":
        matrix = np.asarray(matrix, dtype=float)
        return cls(lambda x: np.broadcast_to(matrix, np.shape(x)[:-1] + (2, 2)),
                   partials=lambda x: np.zeros(np.shape(x)[:-1] + (2, 2, 2)), name=name)

    @classmethod
    def sphere_patch(cls, radius: float = 1.0) -> "LeafMetric":
        """Stereographic chart of the round sphere, 4R²/(1 + |x|²/R²)² δ_αβ, K = 1/R²."""

        def conformal(x):
            r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1) / radius ** 2
            return 4.0 / (1.0 + r2) ** 2

        def metric(x):
            return conformal(x)[..., None, None] * np.eye(2)

        def partials(x):
            x = np.asarray(x, dtype=float)
            r2 = np.sum(x ** 2, axis=-1) / radius ** 2
            d_conformal = -16.0 / radius ** 2 * x / (1.0 + r2)[..., None] ** 3
            return np.eye(2)[..., None] * d_conformal[..., None, None, :]

        return cls(metric, partials, name=f"sphere(R={radius:g})")

    def metric(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array(np.broadcast_to(self._func(x), x.shape[:-1] + (2, 2)), dtype=float)

    def partials(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._partials is not None:
            return np.array(np.broadcast_to(self._partials(x), x.shape[:-1] + (2, 2, 2)), dtype=float)
        return stencils.gradient(self.metric, x, self.fd_step, axes=2)

    def require_positive(self, x) -> None:
        lowest = float(np.min(np.linalg.eigvalsh(tensors.symmetric_part(self.metric(x)))))
        if lowest <= 0:
            raise NonPositiveLeafMetric(f"{self.name}: smallest eigenvalue {lowest:.3e}")

    def christoffel(self, x) -> np.ndarray:
        """Γ^κ_αβ[a], shape ``(..., 2, 2, 2)``."""
        a_inv = np.linalg.inv(self.metric(x))
        da = self.partials(x)
        lowered = np.swapaxes(da, -1, -2) + da - np.moveaxis(da, -1, -3)
        return 0.5 * np.einsum("...KD,...DAB->...KAB", a_inv, lowered)

    def gaussian_curvature(self, x) -> np.ndarray:
        """K = R_1212 / det a."""
        x = np.asarray(x, dtype=float)
        gamma = self.christoffel(x)
        d_gamma = stencils.gradient(self.christoffel, x, self.fd_step, axes=2)
        riemann = (d_gamma[..., :, 1, 1, 0] - d_gamma[..., :, 0, 1, 1]
                   + np.einsum("...RM,...M->...R", gamma[..., :, 0, :], gamma[..., :, 1, 1])
                   - np.einsum("...RM,...M->...R", gamma[..., :, 1, :], gamma[..., :, 0, 1]))
        a = self.metric(x)
        return np.einsum("...R,...R->...", a[..., 0, :], riemann) / np.linalg.det(a)

    def lower(self, x, v) -> np.ndarray:
        return np.einsum("...AB,...B->...A", self.metric(x), v)


@dataclass
class CurvatureSummary:
    K_leaf: np.ndarray
    K_c: np.ndarray
    label: str

    def to_dict(self):
        return {"label": self.label, "K_min": float(np.min(self.K_c)), "K_max": float(np.max(self.K_c))}


def classify_curvature(K: np.ndarray, tol: Optional[float] = None) -> str:
    """parabolic, elliptic or hyperbolic by the sign of K; indefinite when the sign changes."""
    tol = settings.tol("gaussian_curvature") if tol is None else tol
    K = np.asarray(K, dtype=float)
    if np.all(np.abs(K) < tol):
        return "parabolic"
    if np.all(K > tol):
        return "elliptic"
    if np.all(K < -tol):
        return "hyperbolic"
    return "indefinite"


class UmbilicalSpace:
    """Foliated material space with umbilical leaves X³ = const.

    Args:
        chart: Domain chart.
        h: Height function h(X³, t).
        a_leaf: Leaf metric a_αβ(X¹, X²).
        t: Time at which h is frozen.
        dh: Optional ∂₃h(X³, t); stencils otherwise.
    """

    def __init__(self, chart: Chart, h: HeightFunction, a_leaf: LeafMetric, t: float = 0.0,
                 dh: Optional[HeightFunction] = None, name: str = "umbilical"):
        self.chart = chart
        self._h = h
        self._dh = dh
        self.a_leaf = a_leaf
        self.t = t
        self.name = name

    def h(self, x3) -> np.ndarray:
        return np.asarray(self._h(np.asarray(x3, dtype=float), self.t), dtype=float)

    @property
    def a_scale(self) -> float:
        """The time-only factor of Ψ = a_scale² e^{−2h} that pins Ψ(0) = 1."""
        return float(np.exp(self.h(0.0)))

    def psi(self, x3) -> np.ndarray:
        return self.a_scale ** 2 * np.exp(-2.0 * self.h(x3))

    def H(self, x3) -> np.ndarray:
        """Mean curvature H = ∂₃h of the leaf through X³."""
        x3 = np.asarray(x3, dtype=float)
        if self._dh is not None:
            return np.asarray(self._dh(x3, self.t), dtype=float) * np.ones_like(x3)
        return stencils.gradient(lambda q: self.h(q[..., 0]), x3[..., None], settings.numerics.fd_step, axes=1)[..., 0]

    def g(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[:-1] + (3, 3))
        out[..., :2, :2] = self.psi(points[..., 2])[..., None, None] * self.a_leaf.metric(points[..., :2])
        out[..., 2, 2] = 1.0
        return out

    def g_partials(self, points) -> np.ndarray:
        """∂_C g_AB: Ψ∂_γ a_αβ in-plane and ∂₃(Ψa) = −2HΨa across leaves."""
        points = np.asarray(points, dtype=float)
        psi = self.psi(points[..., 2])
        out = np.zeros(points.shape[:-1] + (3, 3, 3))
        out[..., :2, :2, :2] = psi[..., None, None, None] * self.a_leaf.partials(points[..., :2])
        out[..., :2, :2, 2] = (-2.0 * self.H(points[..., 2]) * psi)[..., None, None] * self.a_leaf.metric(points[..., :2])
        return out

    @cached_property
    def metric(self) -> MetricField:
        return MetricField.from_function(self.chart, self.g, self.g_partials, name=f"{self.name} metric")

    def coframe(self) -> Field:
        """E^α = Ψ^{1/2} (a-coframe)^α, E³ = dX³, with a = cᵀc from Cholesky."""

        def components(points):
            points = np.asarray(points, dtype=float)
            c = np.swapaxes(np.linalg.cholesky(self.a_leaf.metric(points[..., :2])), -1, -2)
            out = np.zeros(points.shape[:-1] + (3, 3))
            out[..., :2, :2] = np.sqrt(self.psi(points[..., 2]))[..., None, None] * c
            out[..., 2, 2] = 1.0
            return out

        return AnalyticField(self.chart, components, shape=(3, 3), variance=("u", "d"), name=f"{self.name} coframe")

    def closed_form_christoffel(self, points) -> np.ndarray:
        """Components fixed by the umbilical structure; NaN where the leaf metric decides (Γ^κ_αβ)."""
        points = np.asarray(points, dtype=float)
        H = self.H(points[..., 2])
        g = self.g(points)
        out = np.zeros(points.shape[:-1] + (3, 3, 3))
        out[..., :2, :2, :2] = np.nan
        for alpha in range(2):
            out[..., alpha, alpha, 2] = -H
            out[..., alpha, 2, alpha] = -H
        out[..., 2, :2, :2] = H[..., None, None] * g[..., :2, :2]
        return out

    def christoffel_residual(self, points=None) -> float:
        points = self.chart.test_lattice() if points is None else np.asarray(points, dtype=float)
        generic = self.metric.christoffel(points)
        closed = self.closed_form_christoffel(points)
        mask = ~np.isnan(closed)
        return tensors.max_abs(generic[mask] - closed[mask])

    def normal_curvature(self, p, u) -> np.ndarray:
        """κ_n(u) = Γ³_αβ u^α u^β / g(u, u) for a tangent u with u³ = 0."""
        p = np.asarray(p, dtype=float)
        u = np.asarray(u, dtype=float)
        if np.any(np.abs(u[..., 2]) > 1e-12):
            raise ValueError("normal curvature needs a leaf-tangent direction (u³ = 0)")
        gamma3 = self.metric.christoffel(p)[..., 2, :, :]
        return (np.einsum("...AB,...A,...B->...", gamma3, u, u)
                / np.einsum("...AB,...A,...B->...", self.g(p), u, u))

    def gaussian_curvature(self, points=None) -> CurvatureSummary:
        """K[a] on the leaf points and K_c = K/Ψ(c) on the leaves through them."""
        points = self.chart.test_lattice() if points is None else np.asarray(points, dtype=float)
        K_leaf = self.a_leaf.gaussian_curvature(points[..., :2])
        K_c = K_leaf / self.psi(points[..., 2])
        return CurvatureSummary(K_leaf, K_c, classify_curvature(K_c))


def _height_function(h_spec) -> tuple:
    if callable(h_spec):
        return h_spec, None
    h0 = float(h_spec)
    return (lambda x3, t: h0 * np.asarray(x3, dtype=float)), (lambda x3, t: np.full(np.shape(x3), h0))


def _leaf_metric(a_spec) -> LeafMetric:
    if isinstance(a_spec, LeafMetric):
        return a_spec
    if a_spec is None or a_spec == "flat":
        return LeafMetric.flat()
    if a_spec == "sphere":
        return LeafMetric.sphere_patch()
    if callable(a_spec):
        return LeafMetric(a_spec)
    return LeafMetric.constant(a_spec)


def build_umbilical_space(h_spec: Union[float, HeightFunction], a_spec, chart: Chart, t: float = 0.0,
                          name: str = "umbilical") -> UmbilicalSpace:
    """Assemble g = Ψa + dX³⊗dX³ and validate it against the umbilical closed forms.

    Args:
        h_spec: h₀ for h = h₀X³, or a callable h(X³, t).
        a_spec: ``"flat"``, ``"sphere"``, a constant 2×2 matrix, a callable or a LeafMetric.
        chart: Domain chart.
        t: Time parameter of h.

    Raises:
        NonPositiveLeafMetric: a not positive-definite on the test lattice.
    """
    h, dh = _height_function(h_spec)
    a_leaf = _leaf_metric(a_spec)
    lattice = chart.test_lattice()
    a_leaf.require_positive(lattice[..., :2])

    space = UmbilicalSpace(chart, h, a_leaf, t=t, dh=dh, name=name)
    residual = space.christoffel_residual(lattice)
    check_residual("umbilical Christoffels Γ^α_β3 = −Hδ, Γ³_αβ = Hg_αβ", residual, settings.tol("christoffel"))
    curvature = space.gaussian_curvature(lattice)
    logger.info(f"Built umbilical space {name} (a={a_leaf.name}, Christoffel residual {residual:.2e}, "
                f"leaves {curvature.label})")
    return space


def killing_residual(a: LeafMetric, v: LeafFunction, points=None, chart: Optional[Chart] = None) -> float:
    """max |∇^a_α v̄_β + ∇^a_β v̄_α| with v̄_α = a_αβ v^β.

    Args:
        a: Leaf metric.
        v: Leaf-tangent velocity ``(..., 2) -> (..., 2)``.
        points: Leaf points ``(..., 2)``; the chart's test lattice projected to the leaf otherwise.
        chart: Chart used for the default points.
    """
    if points is None:
        chart = chart or Chart.cube(1.0)
        points = chart.test_lattice()[..., :2]
    points = np.asarray(points, dtype=float)

    def lowered(x):
        return a.lower(x, np.asarray(v(x), dtype=float))

    v_bar = lowered(points)
    grad = stencils.gradient(lowered, points, a.fd_step, axes=2)  # [..., β, α] = ∂_α v̄_β
    nabla = np.swapaxes(grad, -1, -2) - np.einsum("...KAB,...K->...AB", a.christoffel(points), v_bar)
    return tensors.max_abs(nabla + np.swapaxes(nabla, -1, -2))
