"""Orowan-type rate relations, the power-law dislocation speed and dissipation."""
import logging
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField, field_validator

from src.config import settings
from src.exceptions import NegativeStress, NonPositiveSpeed
from src.flow.stretching import rate_of_stretchings
from src.geometry.fields import Field
from src.glide.umbilical import UmbilicalSpace
from src.utils import stencils, tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)

OROWAN_VARIANTS = ("directional", "aligned")


class StressInput(BaseModel):
    """Power-law parameters and the optional stress field T^AB (kg·cm⁻²)."""
    T0: float = PydanticField(..., gt=0)
    n_exp: float = PydanticField(1.0, ge=1)
    v0: float = PydanticField(..., gt=0)
    T: Optional[Any] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("T")
    @classmethod
    def validate_stress_field(cls, v):
        if v is not None and (not isinstance(v, Field) or v.shape != (3, 3)):
            raise ValueError("T must be a rank-2 field of shape (3, 3)")
        return v


def resolved_shear_stress(T, m, n) -> float:
    """T = mTn."""
    return float(np.asarray(m) @ np.asarray(T, dtype=float) @ np.asarray(n))


def orowan_rate(v_g: float, rho_bg: Optional[float] = None, psi_angle: float = 0.0,
                variant: str = "aligned", H: Optional[float] = None) -> float:
    """γ̇ = cos ψ·ρb_g·v_g (directional) or ρb_g·v_g (aligned); ρb_g := H when H is given.

    Raises:
        NonPositiveSpeed: v_g ≤ 0.
    """
    if variant not in OROWAN_VARIANTS:
        raise ValueError(f"Unsupported Orowan variant: {variant}. Supported variants: {', '.join(OROWAN_VARIANTS)}")
    if v_g <= 0:
        raise NonPositiveSpeed(f"v_g = {v_g:g}")
    if H is not None:
        rho_bg = H
    if rho_bg is None:
        raise ValueError("orowan_rate needs ρb_g or H")
    if variant == "aligned":
        return float(rho_bg * v_g)
    if abs(psi_angle) >= np.pi / 2:
        raise ValueError(f"directional variant needs |ψ| < π/2, got {psi_angle:g}")
    return float(np.cos(psi_angle) * rho_bg * v_g)


def dislocation_speed_power_law(T_resolved: float, stress: StressInput,
                                H: Optional[float] = None) -> Tuple[float, Optional[float]]:
    """v_g = v₀(T/T₀)ⁿ and, with H, γ̇ = γ̇₀(T/T₀)ⁿ for γ̇₀ = Hv₀.

    Raises:
        NegativeStress: T < 0.
    """
    if T_resolved < 0:
        raise NegativeStress(f"T = {T_resolved:g}")
    ratio = (T_resolved / stress.T0) ** stress.n_exp
    v_g = stress.v0 * ratio
    if H is None:
        return v_g, None
    gamma_dot = H * stress.v0 * ratio
    if v_g > 0:
        chained = orowan_rate(v_g, variant="aligned", H=H)
        residual = abs(chained - gamma_dot) / max(1.0, abs(gamma_dot))
        check_residual("γ̇ = ρb_g v_g with ρb_g = H and v_g = v₀(T/T₀)ⁿ", residual, settings.tol("orowan_chain"))
    return v_g, gamma_dot


def dissipation_check(T, D_g, m=None, n=None) -> Dict[str, Any]:
    """tr(TD_g) = T^AB D_AB and its sign.

    T is contravariant and D_g covariant, so the pairing needs no metric and
    holds in any components. Orthonormal-frame components are the usual input.

    When the Burgers direction m and the normal n are supplied, the value is
    compared with 2T_mn·γ̇ for γ̇ = nD_gm.
    """
    T = np.asarray(T, dtype=float)
    D_g = np.asarray(D_g, dtype=float)
    value = float(np.einsum("AB,AB->", T, D_g))
    result = {"value": value, "nonnegative": bool(value >= 0.0)}
    if m is not None and n is not None:
        m = np.asarray(m, dtype=float)
        n = np.asarray(n, dtype=float)
        expected = 2.0 * float(m @ T @ n) * float(n @ D_g @ m)
        result["identity_residual"] = abs(value - expected)
        check_residual("tr(TD_g) = 2T γ̇", result["identity_residual"], settings.tol("dissipation_identity"))
    if not result["nonnegative"]:
        logger.warning(f"Negative dissipation tr(TD_g) = {value:.6g}")
    return result


def _lowered(space: UmbilicalSpace, v: Field):
    def func(points):
        return np.einsum("...AB,...B->...A", space.g(points), v.evaluate(points))
    return func


def shear_relation(space: UmbilicalSpace, v: Field, p, gamma_dot: float, S_g: float) -> Dict[str, float]:
    """Residuals of the umbilical shear-rate relations for a leaf-tangent flow velocity.

    ``stretching_block``: D_α3 − (½∂₃v_α + Hv_α) from the generic rate of stretchings.
    ``shear_direction``: D_α3 − γ̇S_g s_α with s = v/v_g.
    ``rate``: γ̇ − cos ψ(Hv_g + ½s^α∂₃v_α).
    ``speed_gradient``: s_α∂₃s^α − v_g⁻¹∂₃v_g, zero exactly when γ̇ = Hv_g cos ψ.
    """
    p = np.asarray(p, dtype=float)
    h = settings.numerics.fd_step
    e3 = np.array([0.0, 0.0, 1.0])
    g = space.metric
    H = float(space.H(p[2]))

    v_up = v.evaluate(p)
    lower = _lowered(space, v)
    v_low = lower(p)
    d3_v_low = stencils.directional(lower, p, e3, h)
    v_g = float(np.sqrt(v_up @ v_low))

    def speed(points):
        return np.sqrt(np.einsum("...A,...A->...", v.evaluate(points), lower(points)))

    def s_up(points):
        return v.evaluate(points) / speed(points)[..., None]

    s_low = v_low / v_g
    D = rate_of_stretchings(g, v, p).D
    block = D[:2, 2]
    cos_psi = 1.0 / S_g

    residuals = {
        "stretching_block": tensors.max_abs(block - (0.5 * d3_v_low[:2] + H * v_low[:2])),
        "shear_direction": tensors.max_abs(block - gamma_dot * S_g * s_low[:2]),
        "rate": abs(gamma_dot - cos_psi * (H * v_g + 0.5 * float(s_up(p)[:2] @ d3_v_low[:2]))),
        "speed_gradient": abs(float(s_low[:2] @ stencils.directional(s_up, p, e3, h)[:2])
                              - float(stencils.directional(speed, p, e3, h)) / v_g),
    }
    check_residual("½∂₃v_α + Hv_α = γ̇S_g s_α", residuals["shear_direction"], 1e-6)
    return residuals


def stress_gradient_condition(space: UmbilicalSpace, m: Field, T_resolved: Callable[[np.ndarray], np.ndarray],
                              n_exp: float, p) -> float:
    """Residual of m_α∂₃m^α = (n/T)∂₃T for a resolved stress profile T(X).

    Raises:
        NegativeStress: T ≤ 0 at ``p``.
    """
    p = np.asarray(p, dtype=float)
    h = settings.numerics.fd_step
    e3 = np.array([0.0, 0.0, 1.0])
    T_p = float(T_resolved(p))
    if T_p <= 0:
        raise NegativeStress(f"T = {T_p:g} at {p.tolist()}; the stress gradient condition needs T > 0")
    m_low = np.einsum("AB,B->A", space.g(p), m.evaluate(p))
    d3_m = stencils.directional(m.evaluate, p, e3, h)
    d3_T = float(stencils.directional(T_resolved, p, e3, h))
    return abs(float(m_low[:2] @ d3_m[:2]) - n_exp * d3_T / T_p)
