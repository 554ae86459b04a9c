"""Burgers vectors of circuits and surfaces, and local Burgers vectors of congruences."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.config import settings
from src.dislocation.density import DislocationDensity, ScalarDensitySpec
from src.exceptions import OpenPath, UndefinedBurgersDirection, ZeroBurgers
from src.frames.bundle import MovingFrame
from src.geometry.curves import ParametricPatch, Polyline
from src.geometry.fields import Field, derived_field
from src.geometry.quadrature import line_integral, patch_quadrature, surface_integral
from src.utils import tensors

logger = logging.getLogger(__name__)

MIN_BURGERS = 1e-12


class LineType(str, Enum):
    EDGE = "Edge"
    SCREW = "Screw"
    MIXED = "Mixed"


@dataclass
class BurgersResult:
    """Burgers vector b^a[γ] in cm."""
    components: np.ndarray
    epsilon: int
    method: str
    extras: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"components": [float(c) for c in self.components], "epsilon": self.epsilon,
                "method": self.method, **self.extras}


def burgers_circuit(frame: MovingFrame, circuit: Polyline, nodes_per_segment: Optional[int] = None) -> BurgersResult:
    """b^a = ε ∮_γ E^a.

    Raises:
        OpenPath: the polyline is not closed.
    """
    if not circuit.closed:
        raise OpenPath(f"circuit with {len(circuit.vertices)} vertices is open")
    frame.chart.require_inside(circuit.vertices, what="circuit vertex")
    b = frame.epsilon * np.asarray(line_integral(frame.coframe, circuit, nodes_per_segment))
    logger.debug(f"Burgers circuit of {frame.name}: {b.tolist()}")
    return BurgersResult(b, frame.epsilon, "circuit")


def burgers_surface(frame: MovingFrame, alpha: DislocationDensity, patch: ParametricPatch,
                    rho: Optional[ScalarDensitySpec] = None, nodes: Optional[int] = None) -> BurgersResult:
    """b^a = ∫_Σ α^{ba} l_b dΣ with l the g-unit normal of the patch.

    In the orthonormal frame the area element times the unit normal is
    l_b dΣ = e_bcd X^c Y^d du dv, where X, Y are the frame components of ∂_u, ∂_v.
    With ρ supplied, the result also carries the mean local Burgers vector
    b / ∫ρ dΣ of the lines threading the patch.

    Raises:
        DegeneratePatch: ∂_u × ∂_v vanishes at a quadrature node.
    """
    points, du, dv, weights = patch_quadrature(patch, nodes)
    e = frame.coframe_at(points)
    X = np.einsum("...aA,...A->...a", e, du)
    Y = np.einsum("...aA,...A->...a", e, dv)
    normal = tensors.frame_cross(X, Y)
    area = np.linalg.norm(normal, axis=-1)
    unit = normal / area[..., None]
    unit_norm = tensors.max_abs(np.linalg.norm(unit, axis=-1) - 1.0)
    if unit_norm > settings.tol("orthonormality"):
        logger.warning(f"patch normal deviates from g-unit length by {unit_norm:.3e}")

    integrand = np.einsum("...ba,...b->...a", alpha.alpha(points), unit) * area[..., None]
    b = patch.orientation * np.einsum("ij...,ij->...", integrand, weights)
    result = BurgersResult(b, alpha.epsilon, "surface")
    if rho is not None:
        lines = patch.orientation * float(np.einsum("ij,ij,ij->", rho.evaluate(points), area, weights))
        result.extras["line_flux"] = lines
        result.extras["mean_local_burgers"] = [float(c) for c in b / lines]
    logger.debug(f"Burgers surface integral of {frame.name}: {b.tolist()}")
    return result


def burgers_from_forms(frame: MovingFrame, forms: Field, patch: ParametricPatch,
                       nodes: Optional[int] = None) -> BurgersResult:
    """b^a = ε ∫_Σ dE^a, the Stokes image of the circuit integral."""
    b = frame.epsilon * np.asarray(surface_integral(forms, patch, nodes))
    return BurgersResult(b, frame.epsilon, "forms")


def stokes_residual(circuit: BurgersResult, surface: BurgersResult) -> float:
    """Relative difference of two Burgers vectors, absolute below unit scale."""
    scale = max(1.0, float(np.linalg.norm(circuit.components)))
    return float(np.linalg.norm(circuit.components - surface.components)) / scale


@dataclass
class LocalBurgers:
    """Local Burgers vector b = ρ⁻¹ lα in frame components with its classification."""
    b: np.ndarray
    b_g: float
    line_type: LineType
    angle: float
    cos_angle: float
    sin_angle: float
    rho: float
    mu: float
    angle_lt: Optional[float]
    gamma_scalar: float
    volterra: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "b": [float(c) for c in self.b], "b_g": self.b_g, "line_type": self.line_type.value,
            "angle": self.angle, "cos_angle": self.cos_angle, "sin_angle": self.sin_angle,
            "rho": self.rho, "mu": self.mu, "angle_lt": self.angle_lt,
            "gamma_scalar": self.gamma_scalar, "volterra": self.volterra,
        }


class VolterraTriple:
    """Volterra frame (l, m, n) of a congruence, evaluated lazily.

    l is the congruence direction, m the Burgers direction from
    μ^a = ½ t_b l_c e^{bca} and n = l × m. ρb = γl + μm splits the local
    Burgers vector into γl = lγ (a vector) and μm.
    """

    def __init__(self, density: DislocationDensity, l: Field, rho: ScalarDensitySpec):
        self.density = density
        self.frame = density.frame
        self.l_field = l
        self.rho = rho

    def at(self, points) -> Dict[str, np.ndarray]:
        points = np.asarray(points, dtype=float)
        l = self.frame.to_frame(points, self.l_field.evaluate(points))
        alpha, gamma, t = self.density.decompose(points)
        mu_vector = 0.5 * np.einsum("bca,...b,...c->...a", tensors.LEVI_CIVITA, t, l)
        mu = np.linalg.norm(mu_vector, axis=-1)
        if np.any(mu < MIN_BURGERS):
            raise UndefinedBurgersDirection(f"μ = {float(np.min(mu)):.3e}")
        m = mu_vector / mu[..., None]
        gamma_vector = np.einsum("...b,...ba->...a", l, gamma)
        return {
            "l": l, "m": m, "n": tensors.frame_cross(l, m), "mu": mu,
            "gamma_vector": gamma_vector,
            "gamma_scalar": np.einsum("...a,...a->...", gamma_vector, l),
            "rho_b": np.einsum("...b,...ba->...a", l, alpha),
        }

    def coordinates(self, points) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(l, m, n) in coordinate components."""
        sample = self.at(points)
        return tuple(self.frame.to_coordinates(points, sample[k]) for k in ("l", "m", "n"))

    def is_edge(self, p, tol: Optional[float] = None) -> bool:
        """b·l = 0 at ``p``."""
        tol = settings.tol("classification") if tol is None else tol
        s = self.at(p)
        return bool(abs(float(s["rho_b"] @ s["l"])) < tol * float(np.linalg.norm(s["rho_b"])))

    def decomposition_residual(self, points) -> float:
        """max |γl + μm − lα|."""
        s = self.at(points)
        return tensors.max_abs(s["gamma_vector"] + s["mu"][..., None] * s["m"] - s["rho_b"])

    def gram_residual(self, points) -> float:
        s = self.at(points)
        triple = np.stack([s["l"], s["m"], s["n"]], axis=-2)
        gram = np.einsum("...ia,...ja->...ij", triple, triple)
        t = self.density.t(points)
        return max(tensors.max_abs(gram - np.eye(3)), tensors.max_abs(np.einsum("...a,...a->...", t, s["m"])))

    def _component(self, key: str, shape) -> Field:
        return derived_field(self.frame.chart, lambda p: self.at(p)[key], shape, name=key)

    @cached_property
    def l(self) -> Field:
        return self._component("l", (3,))

    @cached_property
    def m(self) -> Field:
        return self._component("m", (3,))

    @cached_property
    def n(self) -> Field:
        return self._component("n", (3,))

    @cached_property
    def mu(self) -> Field:
        return self._component("mu", ())

    @cached_property
    def gamma_scalar(self) -> Field:
        return self._component("gamma_scalar", ())

    @cached_property
    def m_coordinates(self) -> Field:
        return derived_field(self.frame.chart, lambda p: self.coordinates(p)[1], (3,), name="m^A")

    @cached_property
    def n_coordinates(self) -> Field:
        return derived_field(self.frame.chart, lambda p: self.coordinates(p)[2], (3,), name="n^A")


def frame_vector_field(frame: MovingFrame, components, name: str = "") -> Field:
    """Coordinate field of a vector with constant frame components, such as E₃."""
    components = np.asarray(components, dtype=float)

    def coordinates(points):
        return frame.to_coordinates(points, np.broadcast_to(components, np.shape(points)[:-1] + (3,)))

    return derived_field(frame.chart, coordinates, (3,), name=name or f"{components.tolist()}·E")


def local_burgers_classify(alpha: DislocationDensity, l: Field, rho: ScalarDensitySpec, p,
                           tol: Optional[float] = None) -> Tuple[LocalBurgers, Optional[VolterraTriple]]:
    """Classify the congruence of ``l`` at ``p`` as Edge, Screw or Mixed.

    Args:
        alpha: Dislocation density of the frame.
        l: g-unit vector field in coordinate components.
        rho: Scalar density.
        p: Point.
        tol: Classification tolerance on |cos| and |sin| of the (b, l) angle.

    Returns:
        The local Burgers vector and, for Edge and Mixed lines, the Volterra triple.

    Raises:
        ZeroBurgers: b_g < 10⁻¹².
        UndefinedBurgersDirection: Edge or Mixed line with μ < 10⁻¹².
    """
    tol = settings.tol("classification") if tol is None else tol
    p = np.asarray(p, dtype=float)
    frame = alpha.frame
    l_frame = frame.to_frame(p, l.evaluate(p))
    l_norm = float(np.linalg.norm(l_frame))
    if abs(l_norm - 1.0) > 1e-8:
        raise ValueError(f"l is not g-unit at {p.tolist()}: ‖l‖_g = {l_norm:.12f}")
    rho_p = float(rho.evaluate(p))

    alpha_p, gamma_p, t_p = alpha.decompose(p)
    rho_b = l_frame @ alpha_p
    b = rho_b / rho_p
    b_g = float(np.linalg.norm(b))
    if b_g < MIN_BURGERS:
        raise ZeroBurgers(f"b_g = {b_g:.3e} at {p.tolist()}")

    cos_angle = float(b @ l_frame) / b_g
    sin_angle = float(np.linalg.norm(np.cross(b, l_frame))) / b_g
    if abs(sin_angle) < tol:
        line_type = LineType.SCREW
    elif abs(cos_angle) < tol:
        line_type = LineType.EDGE
    else:
        line_type = LineType.MIXED

    t_g = float(np.linalg.norm(t_p))
    mu = 0.5 * float(np.linalg.norm(tensors.frame_cross(t_p, l_frame)))
    angle_lt = float(np.arccos(np.clip(t_p @ l_frame / t_g, -1.0, 1.0))) if t_g > MIN_BURGERS else None
    local = LocalBurgers(b=b, b_g=b_g, line_type=line_type, angle=float(np.arctan2(sin_angle, cos_angle)),
                         cos_angle=cos_angle, sin_angle=sin_angle, rho=rho_p, mu=mu, angle_lt=angle_lt,
                         gamma_scalar=float(l_frame @ gamma_p @ l_frame))

    if line_type is LineType.SCREW:
        logger.debug(f"Screw line at {p.tolist()}: b = {b.tolist()}")
        return local, None
    if mu < MIN_BURGERS:
        raise UndefinedBurgersDirection(f"{line_type.value} line with μ = {mu:.3e} at {p.tolist()}")

    triple = VolterraTriple(alpha, l, rho)
    n = triple.at(p)["n"]
    local.volterra = bool(abs(float(b @ n)) < tol * b_g)
    logger.debug(f"{line_type.value} line at {p.tolist()}: b = {b.tolist()}, Volterra={local.volterra}")
    return local, triple


__all__ = [
    "BurgersResult", "LineType", "LocalBurgers", "VolterraTriple", "burgers_circuit", "burgers_from_forms",
    "burgers_surface", "frame_vector_field", "local_burgers_classify", "stokes_residual",
]
