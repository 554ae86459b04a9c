"""Gauss–Legendre quadrature of forms along polylines, patches and boxes."""
import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special

from src.config import settings
from src.exceptions import DegeneratePatch
from src.geometry.curves import ParametricPatch, Polyline
from src.geometry.fields import Field

logger = logging.getLogger(__name__)


def unit_rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights mapped to [0, 1]."""
    if nodes < 2:
        raise ValueError(f"quadrature needs at least 2 nodes, got {nodes}")
    x, w = special.roots_legendre(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def line_integral(omega: Field, path: Polyline, nodes_per_segment: Optional[int] = None):
    """∮ ω along a polyline, segment by segment.

    Exact for polynomial integrands of degree ≤ 2·nodes − 1 on straight segments.
    Forms with leading component slots (a coframe, say) integrate slot by slot
    and return an array.
    """
    nodes = nodes_per_segment or settings.numerics.quadrature_nodes
    x, w = unit_rule(nodes)
    segments = path.segments()
    a = segments[:, 0]
    delta = segments[:, 1] - a
    points = a[:, None, :] + x[None, :, None] * delta[:, None, :]
    values = omega.evaluate(points)
    integrand = np.einsum("sn...A,sA->sn...", values, delta)
    return _scalar_or_array(np.einsum("sn...,n->...", integrand, w))


def surface_integral(tau: Field, patch: ParametricPatch, nodes: Optional[int] = None):
    """∫_Σ τ of a 2-form with components τ_AB, τ(X, Y) = τ_AB X^A Y^B."""
    nodes = nodes or settings.numerics.quadrature_nodes
    x, w = unit_rule(nodes)
    uv = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    points, du, dv = _patch_geometry(patch, uv)
    values = tau.evaluate(points)
    integrand = np.einsum("ij...AB,ijA,ijB->ij...", values, du, dv)
    return _scalar_or_array(patch.orientation * np.einsum("ij...,i,j->...", integrand, w, w))


def patch_quadrature(patch: ParametricPatch, nodes: Optional[int] = None):
    """Quadrature nodes of a patch: points, ∂_u, ∂_v and tensor weights."""
    nodes = nodes or settings.numerics.quadrature_nodes
    x, w = unit_rule(nodes)
    uv = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    points, du, dv = _patch_geometry(patch, uv)
    return points, du, dv, np.outer(w, w)


def _patch_geometry(patch: ParametricPatch, uv: np.ndarray):
    points = np.asarray(patch.surface(uv), dtype=float)
    du = np.asarray(patch.du(uv), dtype=float)
    dv = np.asarray(patch.dv(uv), dtype=float)
    area = np.linalg.norm(np.cross(du, dv), axis=-1)
    if np.any(area < 1e-12):
        raise DegeneratePatch(f"|∂u × ∂v| = {float(np.min(area)):.3e} at a quadrature node")
    return points, du, dv


def volume_integral(density: Callable[[np.ndarray], np.ndarray], lower, upper,
                    nodes: Optional[int] = None) -> float:
    """Tensor-product Gauss–Legendre integral of a point function over a box."""
    nodes = nodes or settings.numerics.quadrature_nodes
    x, w = unit_rule(nodes)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    extent = upper - lower
    axes = [lower[i] + x * extent[i] for i in range(3)]
    points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    values = np.asarray(density(points), dtype=float)
    return float(np.einsum("ijk,i,j,k->", values, w, w, w) * np.prod(extent))


def _scalar_or_array(value: np.ndarray):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value
