"""Index gymnastics shared by the frame, density and flow modules.

Arrays carry point axes first and tensor slots last, so a rank-2 field sampled
at ``P`` points has shape ``(P, 3, 3)``. Frame-indexed quantities live in an
orthonormal basis, so their index position only matters for bookkeeping.
"""
import itertools
import logging

import numpy as np

logger = logging.getLogger(__name__)


def _permutation_symbol(n: int = 3) -> np.ndarray:
    symbol = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        symbol[perm] = np.linalg.det(np.eye(n)[list(perm)])
    return np.rint(symbol)


# Numeric permutation symbol e^{abc} = e_{abc} of a positively oriented frame.
LEVI_CIVITA = _permutation_symbol()


def symmetric_part(t: np.ndarray) -> np.ndarray:
    return 0.5 * (t + np.swapaxes(t, -1, -2))


def antisymmetric_part(t: np.ndarray) -> np.ndarray:
    return 0.5 * (t - np.swapaxes(t, -1, -2))


def frame_cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cross product (u×v)^a = e^{abc} u_b v_c in an orthonormal frame."""
    return np.einsum("abc,...b,...c->...a", LEVI_CIVITA, u, v)


def axial_to_antisymmetric(t: np.ndarray) -> np.ndarray:
    """σ^{ab} = ½ t_c e^{cab}."""
    return 0.5 * np.einsum("...c,cab->...ab", t, LEVI_CIVITA)


def inner(g: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """g(u, v) for coordinate vectors."""
    return np.einsum("...ab,...a,...b->...", g, u, v)


def norm(g: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(inner(g, u, u), 0.0))


def lower(g: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("...ab,...b->...a", g, u)


def metric_cross(g: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Right-handed g-cross product of coordinate vectors.

    (u×v)^A = g^{AD} √g ε_DBC u^B v^C, with √g = √det g.
    """
    sqrt_g = np.sqrt(np.linalg.det(g))
    covariant = sqrt_g[..., None] * np.einsum("dbc,...b,...c->...d", LEVI_CIVITA, u, v)
    return np.einsum("...ad,...d->...a", np.linalg.inv(g), covariant)


def max_abs(values) -> float:
    """Max-norm of an array, 0.0 for empty input."""
    arr = np.asarray(values)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))
