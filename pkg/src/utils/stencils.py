"""Fourth-order first-derivative stencils.

Point functions take an array of points ``(..., 3)`` and return
``(..., *shape)``. Lattice helpers act on sampled 1D arrays along one axis.
"""
from typing import Callable

import numpy as np

from src.exceptions import StencilOutOfRange

CENTRAL_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
CENTRAL_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

# Row j holds the 5-point weights for the derivative at node j of nodes 0..4.
FIVE_POINT_WEIGHTS = np.array([
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
    [1.0, -8.0, 0.0, 8.0, -1.0],
    [-1.0, 6.0, -18.0, 10.0, 3.0],
    [3.0, -16.0, 36.0, -48.0, 25.0],
]) / 12.0


def gradient(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray, h: float,
             axes: int = 3) -> np.ndarray:
    """Central 4th-order gradient of a point function.

    Returns ``(..., *shape, axes)`` with the derivative index last.
    """
    points = np.asarray(points, dtype=float)
    batch = points.shape[:-1]
    shifts = np.zeros((axes, len(CENTRAL_OFFSETS), points.shape[-1]))
    for axis in range(axes):
        shifts[axis, :, axis] = CENTRAL_OFFSETS * h
    shifted = points[None, None, ...] + shifts.reshape(axes, len(CENTRAL_OFFSETS), *([1] * len(batch)), points.shape[-1])
    values = np.asarray(func(shifted))
    # values: (axes, 4, *batch, *shape)
    derivative = np.einsum("k,ak...->a...", CENTRAL_WEIGHTS, values) / h
    return np.moveaxis(derivative, 0, -1)


def directional(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray,
                direction: np.ndarray, h: float) -> np.ndarray:
    """Central 4th-order derivative of a point function along ``direction``."""
    points = np.asarray(points, dtype=float)
    direction = np.asarray(direction, dtype=float)
    offsets = CENTRAL_OFFSETS.reshape(-1, *([1] * points.ndim)) * h
    values = np.asarray(func(points[None, ...] + offsets * direction[None, ...]))
    return np.einsum("k,k...->...", CENTRAL_WEIGHTS, values) / h


def time_derivative(func: Callable[[float], np.ndarray], t: float, h: float,
                    t_min: float, t_max: float) -> np.ndarray:
    """4th-order derivative in time, one-sided near the ends of [t_min, t_max]."""
    j = stencil_position((t - t_min) / h, (t_max - t_min) / h)
    samples = np.stack([np.asarray(func(t + (k - j) * h)) for k in range(5)])
    return np.einsum("k,k...->...", FIVE_POINT_WEIGHTS[j], samples) / h


def stencil_position(u, cells):
    """Node index j (0..4) of the evaluation point inside a 5-point stencil.

    ``u`` is the point's distance from the lower end in steps and ``cells`` the
    interval length in steps. Central (j = 2) wherever the stencil fits.
    """
    u = np.asarray(u, dtype=float)
    lo = np.maximum(0, np.ceil(4 - (cells - u) - 1e-9))
    hi = np.minimum(4, np.floor(u + 1e-9))
    if np.any(lo > hi):
        raise StencilOutOfRange(f"interval of {cells:g} steps cannot hold a 5-point stencil at offset {u}")
    j = np.clip(2, lo, hi).astype(int)
    return int(j) if j.ndim == 0 else j


def lattice_derivative(values: np.ndarray, h: float, axis: int = -1, periodic: bool = True) -> np.ndarray:
    """4th-order derivative of samples on a uniform lattice.

    Periodic lattices use the central stencil with wrap-around; clamped lattices
    switch to one-sided 5-point stencils on the two nodes nearest each end.
    """
    values = np.moveaxis(np.asarray(values), axis, -1)
    n = values.shape[-1]
    if n < 5:
        raise StencilOutOfRange(f"lattice of {n} samples is too short for a 5-point stencil")
    if periodic:
        out = (np.roll(values, 2, axis=-1) - 8.0 * np.roll(values, 1, axis=-1)
               + 8.0 * np.roll(values, -1, axis=-1) - np.roll(values, -2, axis=-1)) / (12.0 * h)
        return np.moveaxis(out, -1, axis)

    out = np.empty_like(values)
    out[..., 2:-2] = (values[..., :-4] - 8.0 * values[..., 1:-3]
                      + 8.0 * values[..., 3:-1] - values[..., 4:]) / (12.0 * h)
    head = values[..., :5]
    tail = values[..., -5:]
    out[..., 0] = np.einsum("k,...k->...", FIVE_POINT_WEIGHTS[0], head) / h
    out[..., 1] = np.einsum("k,...k->...", FIVE_POINT_WEIGHTS[1], head) / h
    out[..., -2] = np.einsum("k,...k->...", FIVE_POINT_WEIGHTS[3], tail) / h
    out[..., -1] = np.einsum("k,...k->...", FIVE_POINT_WEIGHTS[4], tail) / h
    return np.moveaxis(out, -1, axis)
