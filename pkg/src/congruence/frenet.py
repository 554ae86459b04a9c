"""Frenet frames of congruences in the material metric and the complex curvature ψ."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from src.config import settings
from src.exceptions import NotVolterra, VanishingCurvature
from src.frames.bundle import MetricField, levi_civita_covariant
from src.geometry.curves import IntegralCurve, integral_curve
from src.geometry.fields import Field
from src.utils import stencils, tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)


class PrescribedVolterra:
    """Volterra directions (m, n) given directly as coordinate fields."""

    def __init__(self, m: Field, n: Field, edge: bool = False):
        self.m_coordinates = m
        self.n_coordinates = n
        self.edge = edge

    def is_edge(self, p) -> bool:
        return self.edge


@dataclass
class FrenetState:
    """Frenet data of a congruence at one point, vectors in coordinate components."""
    point: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    kappa: float
    tau: float
    theta: Optional[float] = None
    psi: Optional[complex] = None
    dtheta: Optional[float] = None
    m: Optional[np.ndarray] = None
    n: Optional[np.ndarray] = None
    gram_residual: float = 0.0
    complex_residual: Optional[float] = None
    torsion_angle_residual: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        row = {"kappa": self.kappa, "tau": self.tau}
        if self.psi is not None:
            row.update(theta=self.theta, re_psi=self.psi.real, im_psi=self.psi.imag)
        return row


def curvature_vector(g: MetricField, l: Field, points) -> np.ndarray:
    """∇^g_l l at a batch of points."""
    points = np.asarray(points, dtype=float)
    u = l.evaluate(points)
    return (np.einsum("...AB,...B->...A", l.jacobian(points), u)
            + np.einsum("...ABC,...B,...C->...A", g.christoffel(points), u, u))


def _principal_normal(g: MetricField, l: Field, points) -> np.ndarray:
    kappa_vec = curvature_vector(g, l, points)
    return kappa_vec / tensors.norm(g.metric(points), kappa_vec)[..., None]


def _angle(g: MetricField, l: Field, volterra, points) -> np.ndarray:
    gm = g.metric(points)
    e2 = _principal_normal(g, l, points)
    m = volterra.m_coordinates.evaluate(points)
    n = volterra.n_coordinates.evaluate(points)
    return np.arctan2(tensors.inner(gm, e2, n), tensors.inner(gm, e2, m))


def frenet_along(g: MetricField, l: Field, p, volterra=None, kappa_min: Optional[float] = None,
                 h: Optional[float] = None) -> FrenetState:
    """Frenet frame (e1, e2, e3), κ, τ and, with a Volterra frame, ϑ and ψ = κe^{iϑ}.

    Args:
        g: Material metric.
        l: g-unit congruence field in coordinate components.
        p: Point.
        volterra: Anything exposing ``m_coordinates``/``n_coordinates`` fields,
            such as a VolterraTriple or a PrescribedVolterra.
        kappa_min: Smallest curvature for which the frame is defined.
        h: Step of the directional stencils along l.

    Raises:
        VanishingCurvature: κ < kappa_min.
    """
    kappa_min = settings.tol("kappa_min") if kappa_min is None else kappa_min
    h = settings.numerics.fd_step if h is None else h
    p = np.asarray(p, dtype=float)
    gm = g.metric(p)
    e1 = l.evaluate(p)
    unit_error = abs(float(tensors.norm(gm, e1)) - 1.0)
    if unit_error > 1e-8:
        logger.warning(f"l deviates from g-unit length by {unit_error:.3e} at {p.tolist()}")

    kappa_vec = curvature_vector(g, l, p)
    kappa = float(tensors.norm(gm, kappa_vec))
    if kappa < kappa_min:
        raise VanishingCurvature(f"κ = {kappa:.3e} < {kappa_min:.1e} at {p.tolist()}")
    e2 = kappa_vec / kappa
    e3 = tensors.metric_cross(gm, e1, e2)

    e2_rate = (stencils.directional(lambda x: _principal_normal(g, l, x), p, e1, h)
               + np.einsum("ABC,B,C->A", g.christoffel(p), e1, e2))
    tau = float(tensors.inner(gm, e2_rate, e3))
    if tau < 0:
        e3, tau = -e3, -tau

    triad = np.stack([e1, e2, e3])
    gram = tensors.max_abs(np.einsum("iA,AB,jB->ij", triad, gm, triad) - np.eye(3))
    state = FrenetState(point=p, e1=e1, e2=e2, e3=e3, kappa=kappa, tau=tau, gram_residual=gram)
    if volterra is None:
        return state

    m = volterra.m_coordinates.evaluate(p)
    n = volterra.n_coordinates.evaluate(p)
    theta = float(np.arctan2(tensors.inner(gm, e2, n), tensors.inner(gm, e2, m)))
    dtheta = float(stencils.directional(lambda x: np.unwrap(_angle(g, l, volterra, x), axis=0), p, e1, h))
    psi = kappa * np.exp(1j * theta)

    nabla_m = levi_civita_covariant(g, volterra.m_coordinates, l, p)
    nabla_n = levi_civita_covariant(g, volterra.n_coordinates, l, p)
    complex_residual = tensors.max_abs(nabla_m + 1j * nabla_n + psi * e1)

    state.m, state.n = m, n
    state.theta, state.dtheta, state.psi = theta, dtheta, psi
    state.complex_residual = complex_residual
    state.torsion_angle_residual = abs(tau - dtheta)
    check_residual("complex Frenet relation ∇_l N = −ψl", complex_residual, settings.tol("complex_frenet"))
    if volterra.is_edge(p):
        check_residual("edge torsion τ = ∂_l ϑ", state.torsion_angle_residual, settings.tol("torsion_angle"))
    return state


def climb_closed_form(frenet: FrenetState, b_l: float, b_m: float) -> float:
    """b_(m)(τ − ∂_l ϑ) + b_(l) κ sin ϑ."""
    return b_m * (frenet.tau - frenet.dtheta) + b_l * frenet.kappa * np.sin(frenet.theta)


def climb_component(b_field: Field, frenet: FrenetState, g: MetricField, p, l: Optional[Field] = None,
                    tol: Optional[float] = None) -> float:
    """n·∇^g_l b at ``p``, cross-checked against the closed form in κ, τ and ϑ.

    Args:
        b_field: Local Burgers vector field in coordinate components.
        frenet: Frenet state at ``p`` built with a Volterra frame.
        g: Material metric.
        p: Point.
        l: Congruence field; when omitted the derivative runs along the constant e1.
        tol: Slip-plane tolerance on |b·n| relative to b_g.

    Raises:
        NotVolterra: |b·n| above tolerance.
    """
    if frenet.n is None:
        raise ValueError("climb_component needs a Frenet state built with a Volterra frame")
    tol = settings.tol("classification") if tol is None else tol
    p = np.asarray(p, dtype=float)
    gm = g.metric(p)
    b = b_field.evaluate(p)
    b_g = float(tensors.norm(gm, b))
    b_n = float(tensors.inner(gm, b, frenet.n))
    if abs(b_n) > tol * max(b_g, 1.0):
        raise NotVolterra(f"b·n = {b_n:.3e} at {p.tolist()}")

    if l is None:
        direction = frenet.e1
        rate = (stencils.directional(b_field.evaluate, p, direction, settings.numerics.fd_step)
                + np.einsum("ABC,B,C->A", g.christoffel(p), direction, b))
    else:
        rate = levi_civita_covariant(g, b_field, l, p)
    climb = float(tensors.inner(gm, frenet.n, rate))

    b_l = float(tensors.inner(gm, b, frenet.e1))
    b_m = float(tensors.inner(gm, b, frenet.m))
    closed = climb_closed_form(frenet, b_l, b_m)
    check_residual("climb closed form n·∇_l b", abs(climb - closed),
                   settings.tol("climb_closed_form") * max(1.0, abs(closed)))
    return climb


@dataclass
class FrenetTrace:
    """Frenet states sampled along one traced line of a congruence."""
    curve: IntegralCurve
    states: List[FrenetState] = field(default_factory=list)
    climb: List[Optional[float]] = field(default_factory=list)

    @property
    def max_gram_residual(self) -> float:
        return max((s.gram_residual for s in self.states), default=0.0)

    def rows(self) -> List[Dict[str, Any]]:
        rows = []
        for s, state, climb in zip(self.curve.parameters, self.states, self.climb):
            row = {"s": float(s), "tau": state.tau, "kappa": state.kappa, "theta": state.theta,
                   "re_psi": None if state.psi is None else state.psi.real,
                   "im_psi": None if state.psi is None else state.psi.imag,
                   "climb": climb}
            rows.append(row)
        return rows


def trace_frenet(g: MetricField, l: Field, start, length: float, step: float, volterra=None,
                 b_field: Optional[Field] = None, samples: int = 16) -> FrenetTrace:
    """Trace the line of ``l`` through ``start`` and evaluate the Frenet frame along it."""
    curve = integral_curve(l, start, length, step)
    stride = max(1, len(curve.points) // samples)
    kept = IntegralCurve(curve.points[::stride], curve.parameters[::stride], curve.exited, curve.notes)
    trace = FrenetTrace(kept)
    for point in kept.points:
        state = frenet_along(g, l, point, volterra)
        trace.states.append(state)
        trace.climb.append(None if b_field is None or state.n is None
                           else climb_component(b_field, state, g, point, l))
    logger.info(f"Traced {len(trace.states)} Frenet samples from {np.asarray(start).tolist()}, "
                f"max Gram residual {trace.max_gram_residual:.2e}")
    return trace
