import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from src.config import settings
from src.dislocation.burgers import VolterraTriple
from src.exceptions import NotInextensible
from src.frames.bundle import MovingFrame
from src.utils import tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)


@dataclass
class SlipSystem:
    """Shear direction s, slip normal n and the shear rate split of D_g in the Volterra basis.

    Vectors are orthonormal-frame components.
    """
    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    s: np.ndarray
    gamma_dot: float
    D_nl: float
    delta_g: float
    S_g: float
    psi_angle: float
    D: float
    inextensibility_residual: float
    reconstruction_residual: float

    @property
    def cos_psi(self) -> float:
        return 1.0 / self.S_g

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for key, value in asdict(self).items():
            out[key] = value.tolist() if isinstance(value, np.ndarray) else value
        out["cos_psi"] = self.cos_psi
        return out


def _volterra_basis(volterra, p, frame: Optional[MovingFrame]):
    if isinstance(volterra, VolterraTriple):
        sample = volterra.at(p)
        return sample["l"], sample["m"], sample["n"], volterra.frame
    l, m, n = (np.asarray(x, dtype=float) for x in volterra)
    return l, m, n, frame


def slip_system(D_g, volterra: Union[VolterraTriple, Sequence[np.ndarray]], p=None,
                frame: Optional[MovingFrame] = None, tol: Optional[float] = None) -> SlipSystem:
    """Split D_g = γ̇S_g(s⊗n + n⊗s) on the glide plane spanned by (l, m).

    Args:
        D_g: Symmetric rate of stretchings, coordinate lower components at ``p``
            when a frame is known, orthonormal-frame components otherwise.
        volterra: VolterraTriple evaluated at ``p``, or an explicit (l, m, n)
            in frame components.
        p: Point for the triple and the frame.
        frame: Frame for the coordinate-to-frame conversion of D_g when
            ``volterra`` is an explicit triple.
        tol: Inextensibility tolerance relative to ‖D_g‖.

    Raises:
        NotInextensible: uD_gu ≠ 0 for an in-plane u, or D_nn ≠ 0.
    """
    tol = settings.tol("inextensibility") if tol is None else tol
    l, m, n, frame = _volterra_basis(volterra, p, frame)
    D_g = tensors.symmetric_part(np.asarray(D_g, dtype=float))
    if frame is not None:
        F = frame.frame_at(np.asarray(p, dtype=float))
        D_g = np.einsum("aA,bB,AB->ab", F, F, D_g)

    scale = max(float(np.linalg.norm(D_g)), 1e-300)
    directions = {"l": l, "m": m, "(l+m)/√2": (l + m) / np.sqrt(2.0), "n": n}
    stretch = {name: float(u @ D_g @ u) for name, u in directions.items()}
    inextensibility = max(abs(v) for v in stretch.values()) / scale
    if inextensibility > tol:
        worst = max(stretch, key=lambda k: abs(stretch[k]))
        raise NotInextensible(f"u·D_g·u = {stretch[worst]:.3e} for u = {worst}")

    gamma_dot = float(n @ D_g @ m)
    D_nl = float(n @ D_g @ l)
    if abs(gamma_dot) <= 1e-14 * scale:
        raise ValueError("D_nm vanishes: no shear along the Burgers direction to normalise by")
    delta_g = D_nl / gamma_dot
    S_g = float(np.hypot(1.0, delta_g))
    s = (delta_g * l + m) / S_g
    psi_angle = float(np.arccos(1.0 / S_g))
    D = S_g * gamma_dot

    rebuilt = D * (np.outer(s, n) + np.outer(n, s))
    reconstruction = tensors.max_abs(rebuilt - D_g)
    check_residual("D_g = D(s⊗n + n⊗s)", reconstruction, settings.tol("slip_reconstruction") * max(1.0, scale))
    logger.debug(f"Slip system: γ̇={gamma_dot:.6g}, δ_g={delta_g:.6g}, S_g={S_g:.6g}, ψ={psi_angle:.6g}")
    return SlipSystem(l=l, m=m, n=n, s=s, gamma_dot=gamma_dot, D_nl=D_nl, delta_g=delta_g, S_g=S_g,
                      psi_angle=psi_angle, D=D, inextensibility_residual=inextensibility,
                      reconstruction_residual=reconstruction)
