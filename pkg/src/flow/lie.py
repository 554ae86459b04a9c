"""Lie derivatives of tensor fields and the operators built on them."""
import logging
from typing import Callable, Optional

import numpy as np

from src.config import settings
from src.exceptions import UnsupportedRank
from src.frames.bundle import MetricField
from src.geometry.fields import Field
from src.utils import stencils

logger = logging.getLogger(__name__)

MAX_RANK = 3


def lie_derivative(T: Field, u: Field, p, weight: float = 0.0) -> np.ndarray:
    """(L_u T) at ``p`` for tensors of rank ≤ 3 with declared index variance.

    u^C ∂_C T, minus T with an upper slot contracted against ∂_C u^A, plus T with
    a lower slot contracted against ∂_A u^C, plus ``weight``·T·∂_C u^C for
    densities (weight 1 for √g).

    Raises:
        UnsupportedRank: rank above 3.
    """
    if T.rank > MAX_RANK:
        raise UnsupportedRank(f"{T.name} has rank {T.rank}")
    p = np.asarray(p, dtype=float)
    values = T.evaluate(p)
    u_p = u.evaluate(p)
    du = u.jacobian(p)
    batch = p.ndim - 1

    result = np.einsum("...C,...C->...", T.jacobian(p), u_p[(...,) + (None,) * T.rank + (slice(None),)])
    for slot, variance in enumerate(T.variance):
        axis = batch + slot
        moved = np.moveaxis(values, axis, -1)
        if variance == "u":
            term = -np.einsum("...C,...AC->...A", moved, du[(...,) + (None,) * (T.rank - 1) + (slice(None),) * 2])
        else:
            term = np.einsum("...C,...CA->...A", moved, du[(...,) + (None,) * (T.rank - 1) + (slice(None),) * 2])
        result = result + np.moveaxis(term, -1, axis)
    if weight:
        divergence = np.trace(du, axis1=-2, axis2=-1)
        result = result + weight * values * divergence[(...,) + (None,) * T.rank]
    return result


def lie_bracket(u: Field, v: Field, p) -> np.ndarray:
    """[u, v] = L_u v."""
    return lie_derivative(v, u, p)


def small_strain(g: MetricField, u: Field, p) -> np.ndarray:
    """ε = ½ L_u g."""
    return 0.5 * lie_derivative(g.g, u, p)


def divergence(g: MetricField, u: Field, p) -> np.ndarray:
    """div_g u = ∇_A u^A = ∂_A u^A + Γ^A_AC u^C."""
    p = np.asarray(p, dtype=float)
    return (np.trace(u.jacobian(p), axis1=-2, axis2=-1)
            + np.einsum("...AAC,...C->...", g.christoffel(p), u.evaluate(p)))


def coordinate_divergence(g: MetricField, u: Field, p, h: Optional[float] = None) -> np.ndarray:
    """div_g u = g^{-1/2} ∂_A(√g u^A) with stencils on √g u."""
    p = np.asarray(p, dtype=float)
    h = h or settings.numerics.fd_step

    def flux(points):
        return g.sqrt_det(points)[..., None] * u.evaluate(points)

    gradient = stencils.gradient(flux, p, h)
    return np.trace(gradient, axis1=-2, axis2=-1) / g.sqrt_det(p)


def extended_lie_derivative(T_at: Callable[[float], Field], u: Field, p, t: float, h: float,
                            t_min: float, t_max: float, weight: float = 0.0) -> np.ndarray:
    """L'_u T = ∂_t T + L_u T for a time-dependent field ``T_at(t)``."""
    rate = stencils.time_derivative(lambda s: T_at(s).evaluate(p), t, h, t_min, t_max)
    return rate + lie_derivative(T_at(t), u, p, weight)
