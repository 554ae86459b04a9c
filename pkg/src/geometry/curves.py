import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from src.exceptions import PointOutsideChart, VanishingField
from src.geometry.chart import Chart
from src.geometry.fields import Field
from src.utils.integrators import rk4_step, uniform_steps

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Polyline:
    """Ordered vertices in chart coordinates; closed lines wrap last→first."""
    vertices: np.ndarray
    closed: bool = False
    chart: Optional[Chart] = None

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError(f"Polyline vertices must have shape (n, 3), got {vertices.shape}")
        if len(vertices) < 2:
            raise ValueError("Polyline needs at least 2 vertices")
        if self.closed and np.allclose(vertices[0], vertices[1]):
            raise ValueError("closed Polyline has coincident first and second vertices")
        if self.chart is not None:
            self.chart.require_inside(vertices, what="Polyline vertex")
        object.__setattr__(self, "vertices", vertices)

    def segments(self) -> np.ndarray:
        """Segment end points, shape ``(S, 2, 3)``."""
        starts = self.vertices
        ends = np.roll(self.vertices, -1, axis=0)
        if not self.closed:
            starts, ends = starts[:-1], ends[:-1]
        return np.stack([starts, ends], axis=1)

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1].copy(), self.closed, self.chart)

    @property
    def length(self) -> float:
        seg = self.segments()
        return float(np.sum(np.linalg.norm(seg[:, 1] - seg[:, 0], axis=-1)))


class ParametricPatch:
    """Surface (u, v) ∈ [0,1]² → chart coordinates with its tangent vectors.

    Args:
        surface: Map from ``(..., 2)`` parameters to ``(..., 3)`` points.
        du: ∂_u of the map, same signature.
        dv: ∂_v of the map, same signature.
        orientation: +1 keeps ∂_u × ∂_v, −1 reverses it.
        chart: Optional chart to check the image against.
        grid: Corner points for rectangular patches, used by ``boundary``.
    """

    def __init__(self, surface: Callable[[np.ndarray], np.ndarray], du: Callable[[np.ndarray], np.ndarray],
                 dv: Callable[[np.ndarray], np.ndarray], orientation: int = 1, chart: Optional[Chart] = None,
                 grid: Optional[np.ndarray] = None):
        if orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {orientation}")
        self.surface = surface
        self.du = du
        self.dv = dv
        self.orientation = orientation
        self.chart = chart
        self.grid = None if grid is None else np.asarray(grid, dtype=float)
        if chart is not None:
            uv = np.stack(np.meshgrid(np.linspace(0, 1, 5), np.linspace(0, 1, 5), indexing="ij"), axis=-1)
            chart.require_inside(self.surface(uv), what="patch point")

    @classmethod
    def rectangle(cls, origin, edge_u, edge_v, orientation: int = 1, chart: Optional[Chart] = None) -> "ParametricPatch":
        """Flat parallelogram origin + u·edge_u + v·edge_v."""
        origin = np.asarray(origin, dtype=float)
        edge_u = np.asarray(edge_u, dtype=float)
        edge_v = np.asarray(edge_v, dtype=float)
        grid = np.stack([origin, origin + edge_u, origin + edge_u + edge_v, origin + edge_v])
        return cls(
            surface=lambda uv: origin + uv[..., 0:1] * edge_u + uv[..., 1:2] * edge_v,
            du=lambda uv: np.broadcast_to(edge_u, uv.shape[:-1] + (3,)),
            dv=lambda uv: np.broadcast_to(edge_v, uv.shape[:-1] + (3,)),
            orientation=orientation, chart=chart, grid=grid,
        )

    def boundary(self) -> Polyline:
        """Boundary circuit of a rectangular patch, oriented with the patch."""
        if self.grid is None:
            raise ValueError("boundary() is only defined for rectangular patches")
        grid = self.grid if self.orientation == 1 else self.grid[::-1].copy()
        return Polyline(grid, closed=True, chart=self.chart)


@dataclass
class IntegralCurve:
    """Samples of an integral curve; ``exited`` flags an early stop at the chart boundary."""
    points: np.ndarray
    parameters: np.ndarray
    exited: bool = False
    notes: list = field(default_factory=list)

    @property
    def polyline(self) -> Polyline:
        return Polyline(self.points, closed=False)

    @property
    def endpoint(self) -> np.ndarray:
        return self.points[-1]


def integral_curve(v: Field, start, param_length: float, step: float, normalize: bool = False,
                   min_speed: float = 1e-10) -> IntegralCurve:
    """Trace dx/ds = v(x) with fixed-step classical RK4.

    Args:
        v: Vector field (coordinate components).
        start: Initial point.
        param_length: Total parameter length; negative values trace backwards.
        step: Requested step; the actual step divides ``param_length`` evenly.
        normalize: Use the Euclidean unit field v/|v| (arclength in coordinates).
        min_speed: |v| below this raises VanishingField.

    Returns:
        IntegralCurve: vertices and parameters; ``exited`` is set when the
        curve left the chart and the trace was cut short.
    """
    start = np.asarray(start, dtype=float)
    v.chart.require_inside(start, what="curve start")
    n_steps, h = uniform_steps(param_length, step)

    def rhs(s: float, x: np.ndarray) -> np.ndarray:
        value = v.evaluate(x)
        speed = float(np.linalg.norm(value))
        if speed < min_speed:
            raise VanishingField(f"|v| = {speed:.3e} at {x.tolist()}")
        return value / speed if normalize else value

    points = [start]
    params = [0.0]
    x = start
    exited = False
    for i in range(n_steps):
        try:
            x = rk4_step(rhs, params[-1], x, h)
        except PointOutsideChart:
            exited = True
            break
        if not np.all(v.chart.contains(x)):
            exited = True
            break
        points.append(x)
        params.append((i + 1) * h)

    curve = IntegralCurve(np.array(points), np.array(params), exited)
    if exited:
        logger.warning(f"Integral curve from {start.tolist()} left the chart at parameter {params[-1]:.4g}")
        curve.notes.append("exited chart")
    return curve
