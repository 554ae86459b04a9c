"""Principal congruences of the symmetric density γ on umbilical crystal surfaces."""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from src.config import settings
from src.exceptions import PatternMismatch
from src.geometry.fields import Field
from src.utils import tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)

E3 = np.array([0.0, 0.0, 1.0])


def principal_axes(phi: float):
    """(γ₁, γ₂, γ₃, k) of the in-plane angle φ, in frame components."""
    gamma3 = np.array([np.cos(phi), np.sin(phi), 0.0])
    k = np.array([np.sin(phi), -np.cos(phi), 0.0])
    return (k + E3) / np.sqrt(2.0), (k - E3) / np.sqrt(2.0), gamma3, k


def principal_gamma_tensor(gamma: float, phi: float) -> np.ndarray:
    """γ(−γ₁⊗γ₁ + γ₂⊗γ₂)."""
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    g1, g2, _, _ = principal_axes(phi)
    return gamma * (-np.outer(g1, g1) + np.outer(g2, g2))


@dataclass
class PrincipalDecomposition:
    """Principal frame of γ together with H and the Burgers data of l = γ₃.

    ``mu`` is √(H² + γ²) and ``mu_contracted`` is |ρb| contracted from the density.
    For l = γ₃ the symmetric part drops out and ρb = ½ t × γ₃ = −Hk, so ``mu_axial``
    is |H|; ``mu_discrepancy`` is mu − mu_axial and vanishes only when γ = 0.
    """
    gamma: float
    phi: float
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray
    k: np.ndarray
    H: float
    t_reconstructed: np.ndarray
    t_residual: float
    mu: float
    mu_contracted: float
    rho_b: np.ndarray
    m: np.ndarray
    degenerate: bool
    gamma_residual: float
    mu_axial: float
    m_dot_k: float
    burgers_residual: float
    mu_discrepancy: float

    @property
    def rho_b_g(self) -> float:
        return float(np.linalg.norm(self.rho_b))

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for key, value in asdict(self).items():
            out[key] = value.tolist() if isinstance(value, np.ndarray) else value
        out["rho_b_g"] = self.rho_b_g
        return out


def principal_congruences(gamma_tensor: Union[Field, np.ndarray], t_vec: Union[Field, np.ndarray], p=None,
                          phi: float = 0.0, rel_tol: Optional[float] = None) -> PrincipalDecomposition:
    """Split γ into its principal frame and check the (−γ, 0, γ) spectral pattern.

    Args:
        gamma_tensor: Symmetric γ^{ab}, as a field or as the components at ``p``.
        t_vec: Axial vector t_a, as a field or as components.
        p: Point at which fields are evaluated.
        phi: In-plane angle of γ₃ used when γ = 0 and the frame is not fixed by γ.
        rel_tol: Relative tolerance of the eigenvalue pattern.

    Raises:
        PatternMismatch: eigenvalues not of the form (−γ, 0, γ).
    """
    rel_tol = settings.tol("eigen_pattern") if rel_tol is None else rel_tol
    gamma_p = gamma_tensor.evaluate(p) if isinstance(gamma_tensor, Field) else np.asarray(gamma_tensor, dtype=float)
    t_p = t_vec.evaluate(p) if isinstance(t_vec, Field) else np.asarray(t_vec, dtype=float)
    gamma_p = tensors.symmetric_part(gamma_p)

    eigenvalues, eigenvectors = np.linalg.eigh(gamma_p)
    scale = float(np.max(np.abs(eigenvalues)))
    degenerate = scale < 1e-12
    if not degenerate:
        if abs(eigenvalues[0] + eigenvalues[2]) > rel_tol * scale or abs(eigenvalues[1]) > rel_tol * scale:
            raise PatternMismatch(f"eigenvalues {eigenvalues.tolist()} do not fit (−γ, 0, γ)")

    H = 0.5 * float(t_p[2])
    if degenerate:
        gamma = 0.0
        gamma1, gamma2, gamma3, k = principal_axes(phi)
    else:
        gamma = float(eigenvalues[2])
        gamma1 = eigenvectors[:, 0] * (1.0 if eigenvectors[2, 0] >= 0 else -1.0)
        gamma2 = eigenvectors[:, 2] * (1.0 if eigenvectors[2, 2] <= 0 else -1.0)
        k = (gamma1 + gamma2) / np.sqrt(2.0)
        e3 = (gamma1 - gamma2) / np.sqrt(2.0)
        gamma3 = np.cross(e3, k)
        phi = float(np.arctan2(gamma3[1], gamma3[0]))
        alignment = tensors.max_abs(e3 - E3)
        if alignment > 1e-6:
            logger.warning(f"principal frame places E₃ off the crystal normal by {alignment:.3e}")

    gamma_residual = tensors.max_abs(gamma * (-np.outer(gamma1, gamma1) + np.outer(gamma2, gamma2)) - gamma_p)
    t_reconstructed = 2.0 * (-gamma * gamma3 + H * E3)
    t_residual = tensors.max_abs(t_reconstructed - t_p)
    check_residual("axial vector t = 2(−γγ₃ + HE₃)", t_residual, settings.tol("reconstruction"))

    alpha = gamma_p + tensors.axial_to_antisymmetric(t_p)
    rho_b = gamma3 @ alpha
    mu_contracted = float(np.linalg.norm(rho_b))
    m = rho_b / mu_contracted if mu_contracted > 1e-12 else k
    burgers_residual = tensors.max_abs(rho_b + H * k)
    if burgers_residual > settings.tol("reconstruction"):
        logger.warning(f"ρb for l = γ₃ differs from −Hk by {burgers_residual:.3e} (m·k = {float(m @ k):.6f})")
    mu = float(np.hypot(H, gamma))

    decomposition = PrincipalDecomposition(
        gamma=gamma, phi=float(phi), gamma1=gamma1, gamma2=gamma2, gamma3=gamma3, k=k, H=H,
        t_reconstructed=t_reconstructed, t_residual=t_residual, mu=mu,
        mu_contracted=mu_contracted, rho_b=rho_b, m=m, degenerate=degenerate, gamma_residual=gamma_residual,
        mu_axial=abs(H), m_dot_k=float(m @ k), burgers_residual=burgers_residual, mu_discrepancy=mu - abs(H),
    )
    logger.debug(f"Principal congruences: γ={gamma:.6g}, φ={phi:.6g}, H={H:.6g}, degenerate={degenerate}")
    return decomposition
