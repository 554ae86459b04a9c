import logging
from dataclasses import dataclass

import numpy as np

from src.config import settings
from src.frames.bundle import MetricField
from src.geometry.fields import Field
from src.flow.lie import coordinate_divergence, divergence
from src.utils import tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)


@dataclass
class Stretching:
    """Rate of stretchings D_AB = sym ∇_A v_B with its trace and the divergence of v."""
    L: np.ndarray
    D: np.ndarray
    trace: np.ndarray
    divergence: np.ndarray
    divergence_coordinate: np.ndarray
    residual: float


def velocity_gradient(g: MetricField, v: Field, p) -> np.ndarray:
    """L_AB = ∇_A v_B = g_BC(∂_A v^C + Γ^C_AD v^D)."""
    p = np.asarray(p, dtype=float)
    nabla_up = np.swapaxes(v.jacobian(p), -1, -2) + np.einsum("...CAD,...D->...AC", g.christoffel(p), v.evaluate(p))
    return np.einsum("...AC,...BC->...AB", nabla_up, g.metric(p))


def rate_of_stretchings(g: MetricField, v: Field, p) -> Stretching:
    """D = sym(∇v♭) and the check tr_g D = div_g v = g^{-1/2} ∂_A(√g v^A)."""
    p = np.asarray(p, dtype=float)
    L = velocity_gradient(g, v, p)
    D = tensors.symmetric_part(L)
    trace = np.einsum("...AB,...AB->...", g.inverse(p), D)
    div = divergence(g, v, p)
    div_coordinate = coordinate_divergence(g, v, p)
    residual = max(tensors.max_abs(trace - div), tensors.max_abs(div - div_coordinate))
    check_residual("tr_g D = div_g v", residual, settings.tol("trace_divergence"))
    return Stretching(L, D, trace, div, div_coordinate, residual)
