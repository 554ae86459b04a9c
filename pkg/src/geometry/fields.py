"""Fields over a chart.

A field maps points ``(..., 3)`` to component arrays ``(..., *shape)``.
Closed-form and gridded fields share the same interface, so every higher
module is agnostic of how its inputs are represented.
"""
import logging
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.exceptions import FieldValidationError
from src.geometry.chart import Chart
from src.utils import stencils

logger = logging.getLogger(__name__)

PointFunction = Callable[[np.ndarray], np.ndarray]


def _default_variance(shape: Tuple[int, ...]) -> Tuple[str, ...]:
    return ("u",) * len(shape)


class Field(ABC):
    """Base class for fields over a chart."""

    def __init__(self, chart: Chart, shape: Tuple[int, ...] = (), variance: Optional[Sequence[str]] = None,
                 name: str = ""):
        self.chart = chart
        self.shape = tuple(shape)
        self.variance = tuple(variance) if variance is not None else _default_variance(self.shape)
        if len(self.variance) != len(self.shape) or any(v not in ("u", "d") for v in self.variance):
            raise ValueError(f"variance {self.variance} does not match shape {self.shape}")
        self.name = name or type(self).__name__

    @property
    def rank(self) -> int:
        return len(self.shape)

    @abstractmethod
    def evaluate(self, points) -> np.ndarray:
        """Components at ``points``, shape ``(..., *shape)``."""
        pass

    @abstractmethod
    def jacobian(self, points) -> np.ndarray:
        """Partials ∂_A of every component, shape ``(..., *shape, 3)``."""
        pass

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)

    def __repr__(self) -> str:
        return f"{self.name}(shape={self.shape}, variance={''.join(self.variance)})"


class AnalyticField(Field):
    """Field given by closed-form component functions.

    Args:
        chart: Domain chart.
        func: Point function returning components.
        shape: Component shape, ``()`` for scalars.
        derivative: Optional point function returning the partials with the
            derivative index last. Validated against central differences.
        variance: Index positions, ``"u"`` (upper) or ``"d"`` (lower) per slot.
        fd_step: Stencil step used when no derivative is supplied.
        validate: Check supplied partials at construction.
    """

    def __init__(self, chart: Chart, func: PointFunction, shape: Tuple[int, ...] = (),
                 derivative: Optional[PointFunction] = None, variance: Optional[Sequence[str]] = None,
                 fd_step: Optional[float] = None, name: str = "", validate: bool = True):
        super().__init__(chart, shape, variance, name)
        self._func = func
        self._derivative = derivative
        self.fd_step = fd_step or settings.numerics.fd_step
        if derivative is not None and validate:
            self._validate_partials()

    @classmethod
    def constant(cls, chart: Chart, value, variance: Optional[Sequence[str]] = None, name: str = "") -> "AnalyticField":
        value = np.asarray(value, dtype=float)
        shape = value.shape
        return cls(chart,
                   lambda points: np.broadcast_to(value, np.shape(points)[:-1] + shape),
                   shape=shape,
                   derivative=lambda points: np.zeros(np.shape(points)[:-1] + shape + (3,)),
                   variance=variance, name=name or "constant", validate=False)

    def _raw(self, points: np.ndarray) -> np.ndarray:
        values = np.asarray(self._func(points), dtype=float)
        return np.broadcast_to(values, points.shape[:-1] + self.shape)

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        self.chart.require_inside(points)
        return np.array(self._raw(points))

    def jacobian(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        self.chart.require_inside(points)
        if self._derivative is not None:
            values = np.asarray(self._derivative(points), dtype=float)
            return np.array(np.broadcast_to(values, points.shape[:-1] + self.shape + (3,)))
        return stencils.gradient(self._raw, points, self.fd_step)

    def _validate_partials(self, samples: int = 8) -> None:
        rng = np.random.default_rng(settings.seed)
        chart = self.chart
        points = rng.uniform(chart.lower_array + 0.1 * chart.extent,
                             chart.upper_array - 0.1 * chart.extent, size=(samples, 3))
        supplied = np.asarray(self._derivative(points), dtype=float)
        numeric = stencils.gradient(self._raw, points, 1e-3 * float(np.min(chart.extent)) / 4.0)
        scale = np.maximum(1.0, np.abs(numeric))
        worst = float(np.max(np.abs(supplied - numeric) / scale))
        tol = settings.tol("partials_relative")
        if worst > tol:
            raise FieldValidationError(f"{self.name}: supplied partials differ from central differences by {worst:.3e}")
        logger.debug(f"{self.name}: analytic partials validated (max relative deviation {worst:.2e})")


class GriddedField(Field):
    """Field sampled on the nodes of its chart.

    Values between nodes come from tensor-product cubic Lagrange
    interpolation; partials from 5-point stencils with step = grid spacing,
    central in the interior and one-sided near the boundary.
    """

    def __init__(self, chart: Chart, values: np.ndarray, variance: Optional[Sequence[str]] = None, name: str = ""):
        values = np.asarray(values, dtype=float)
        nodes = tuple(n + 1 for n in chart.grid_shape)
        if values.shape[:3] != nodes:
            raise ValueError(f"gridded values of shape {values.shape} do not match chart nodes {nodes}")
        super().__init__(chart, values.shape[3:], variance, name)
        self._values = values.reshape(nodes + (-1,))

    @classmethod
    def sample(cls, field: Field, chart: Optional[Chart] = None, name: str = "") -> "GriddedField":
        """Sample any field on the chart nodes."""
        chart = chart or field.chart
        values = field.evaluate(chart.nodes())
        return cls(chart, values, field.variance, name or f"gridded {field.name}")

    def _interpolate(self, points: np.ndarray) -> np.ndarray:
        chart = self.chart
        flat = points.reshape(-1, 3)
        weights = []
        indices = []
        for axis in range(3):
            cells = chart.grid_shape[axis]
            u = (flat[:, axis] - chart.lower[axis]) / chart.spacing[axis]
            i0 = np.clip(np.floor(u).astype(int) - 1, 0, cells - 3)
            t = u - i0
            w = np.stack([
                -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
                t * (t - 2.0) * (t - 3.0) / 2.0,
                -t * (t - 1.0) * (t - 3.0) / 2.0,
                t * (t - 1.0) * (t - 2.0) / 6.0,
            ], axis=-1)
            weights.append(w)
            indices.append(i0[:, None] + np.arange(4))
        ix, iy, iz = indices
        block = self._values[ix[:, :, None, None], iy[:, None, :, None], iz[:, None, None, :]]
        result = np.einsum("pi,pj,pk,pijkc->pc", weights[0], weights[1], weights[2], block)
        return result.reshape(points.shape[:-1] + self.shape)

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        self.chart.require_inside(points)
        return self._interpolate(points)

    def jacobian(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        self.chart.require_inside(points)
        chart = self.chart
        partials = []
        for axis in range(3):
            h = chart.spacing[axis]
            u = (points[..., axis] - chart.lower[axis]) / h
            position = np.asarray(stencils.stencil_position(u, chart.grid_shape[axis]))
            samples = []
            for k in range(5):
                shifted = points.copy()
                shifted[..., axis] = points[..., axis] + (k - position) * h
                shifted[..., axis] = np.clip(shifted[..., axis], chart.lower[axis], chart.upper[axis])
                samples.append(self._interpolate(shifted))
            samples = np.stack(samples, axis=-1)
            w = stencils.FIVE_POINT_WEIGHTS[position]
            partials.append(np.einsum("...k,...k->...", samples,
                                      w.reshape(w.shape[:-1] + (1,) * len(self.shape) + (5,))) / h)
        return np.stack(partials, axis=-1)


def partial_derivative(field: Field, axis: int, point) -> np.ndarray:
    """∂_A of every component of ``field`` at ``point``; ``axis`` is 0-based.

    Raises:
        PointOutsideChart: point outside the chart box.
        StencilOutOfRange: gridded stencil does not fit the grid.
    """
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    return field.jacobian(np.asarray(point, dtype=float))[..., axis]


def derived_field(chart: Chart, func: PointFunction, shape: Tuple[int, ...], variance: Optional[Sequence[str]] = None,
                  name: str = "", fd_step: Optional[float] = None) -> AnalyticField:
    """Field computed pointwise from other fields; partials by central differences."""
    return AnalyticField(chart, func, shape=shape, variance=variance, name=name, fd_step=fd_step)


__all__ = ["Field", "AnalyticField", "GriddedField", "partial_derivative", "derived_field"]
