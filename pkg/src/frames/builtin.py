"""Closed-form Bravais coframes with exact partials."""
import logging

import numpy as np

from src.frames.base import CoframeSpec

logger = logging.getLogger(__name__)


def _identity(points: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.eye(3), points.shape[:-1] + (3, 3)).copy()


class HolonomicCoframe(CoframeSpec):
    """E^a = dX^a; the dislocation-free reference crystal."""
    name = "holonomic"

    def components(self, points: np.ndarray) -> np.ndarray:
        return _identity(np.asarray(points, dtype=float))

    def partials(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(points)[:-1] + (3, 3, 3))


class ScrewCoframe(CoframeSpec):
    """E³ = dX³ + b₀X¹dX², others Cartesian; a uniform screw density b₀E₃⊗E₃."""
    name = "screw"

    def __init__(self, b0: float = 0.1):
        super().__init__(b0=float(b0))
        self.b0 = float(b0)

    def components(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        e = _identity(points)
        e[..., 2, 1] = self.b0 * points[..., 0]
        return e

    def partials(self, points: np.ndarray) -> np.ndarray:
        de = np.zeros(np.shape(points)[:-1] + (3, 3, 3))
        de[..., 2, 1, 0] = self.b0
        return de


class EdgeCoframe(CoframeSpec):
    """E¹ = dX¹ + βX¹dX², others Cartesian; straight edge lines along E₃ with b ∥ E₁."""
    name = "edge"

    def __init__(self, beta: float = 0.1):
        super().__init__(beta=float(beta))
        self.beta = float(beta)

    def components(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        e = _identity(points)
        e[..., 0, 1] = self.beta * points[..., 0]
        return e

    def partials(self, points: np.ndarray) -> np.ndarray:
        de = np.zeros(np.shape(points)[:-1] + (3, 3, 3))
        de[..., 0, 1, 0] = self.beta
        return de


class UmbilicalCoframe(CoframeSpec):
    """E^α = e^{−h₀X³}dX^α, E³ = dX³.

    Every X³ = const leaf is umbilical with mean curvature h₀ in the
    induced metric e^{−2h₀X³}(dX¹⊗dX¹ + dX²⊗dX²) + dX³⊗dX³.
    """
    name = "umbilical"

    def __init__(self, h0: float = 0.5):
        super().__init__(h0=float(h0))
        self.h0 = float(h0)

    def components(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        e = _identity(points)
        scale = np.exp(-self.h0 * points[..., 2])
        e[..., 0, 0] = scale
        e[..., 1, 1] = scale
        return e

    def partials(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        de = np.zeros(points.shape[:-1] + (3, 3, 3))
        slope = -self.h0 * np.exp(-self.h0 * points[..., 2])
        de[..., 0, 0, 2] = slope
        de[..., 1, 1, 2] = slope
        return de


BUILTIN_COFRAMES = {
    HolonomicCoframe.name: HolonomicCoframe,
    ScrewCoframe.name: ScrewCoframe,
    EdgeCoframe.name: EdgeCoframe,
    UmbilicalCoframe.name: UmbilicalCoframe,
}
