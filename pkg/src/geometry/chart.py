import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.exceptions import PointOutsideChart

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chart:
    """Box-shaped coordinate chart X = (X^A) in cm.

    ``grid_shape`` counts cells per axis; gridded fields carry ``grid_shape + 1``
    nodes per axis.
    """
    lower: Tuple[float, float, float]
    upper: Tuple[float, float, float]
    grid_shape: Tuple[int, int, int] = (32, 32, 32)

    def __post_init__(self):
        lower = tuple(float(x) for x in self.lower)
        upper = tuple(float(x) for x in self.upper)
        grid = tuple(int(n) for n in self.grid_shape)
        if len(lower) != 3 or len(upper) != 3 or len(grid) != 3:
            raise ValueError("Chart needs three lower bounds, three upper bounds and three grid sizes")
        if any(u <= l for l, u in zip(lower, upper)):
            raise ValueError(f"Chart upper bounds {upper} must exceed lower bounds {lower}")
        if any(n < 4 for n in grid):
            raise ValueError(f"grid_shape {grid} must have at least 4 cells per axis")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "grid_shape", grid)

    @classmethod
    def cube(cls, half_width: float, cells: Optional[int] = None) -> "Chart":
        """Centered cube [−w, w]³."""
        cells = cells or settings.numerics.grid_cells
        return cls((-half_width,) * 3, (half_width,) * 3, (cells,) * 3)

    @property
    def lower_array(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def upper_array(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def extent(self) -> np.ndarray:
        return self.upper_array - self.lower_array

    @property
    def spacing(self) -> np.ndarray:
        return self.extent / np.array(self.grid_shape)

    def node_axes(self):
        return [np.linspace(l, u, n + 1) for l, u, n in zip(self.lower, self.upper, self.grid_shape)]

    def nodes(self) -> np.ndarray:
        """All grid nodes, shape ``(n1+1, n2+1, n3+1, 3)``."""
        return np.stack(np.meshgrid(*self.node_axes(), indexing="ij"), axis=-1)

    def contains(self, points, margin: float = 0.0) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        slack = 1e-12 * self.extent
        inside = (points >= self.lower_array + margin - slack) & (points <= self.upper_array - margin + slack)
        return np.all(inside, axis=-1)

    def require_inside(self, points, what: str = "point") -> None:
        points = np.asarray(points, dtype=float)
        inside = self.contains(points)
        if not np.all(inside):
            bad = points.reshape(-1, 3)[~inside.reshape(-1)][0]
            raise PointOutsideChart(f"{what} {bad.tolist()} lies outside [{self.lower}, {self.upper}]")

    def test_lattice(self, seed: Optional[int] = None, per_axis: Optional[int] = None,
                     n_random: Optional[int] = None) -> np.ndarray:
        """Uniform interior lattice plus seeded random points, shape ``(N, 3)``."""
        seed = settings.seed if seed is None else seed
        per_axis = per_axis or settings.numerics.lattice_per_axis
        n_random = settings.numerics.lattice_random if n_random is None else n_random

        fractions = np.linspace(0.0, 1.0, per_axis + 2)[1:-1]
        axes = [l + fractions * e for l, e in zip(self.lower, self.extent)]
        uniform = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)

        rng = np.random.default_rng(seed)
        random = rng.uniform(self.lower_array + 0.1 * self.extent,
                             self.upper_array - 0.1 * self.extent,
                             size=(n_random, 3))
        return np.concatenate([uniform, random], axis=0)

    def sub_box(self, lower: Sequence[float], upper: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Validated region [lower, upper] inside the chart."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if np.any(upper <= lower):
            raise ValueError(f"region upper {upper.tolist()} must exceed lower {lower.tolist()}")
        self.require_inside(np.stack([lower, upper]), what="region corner")
        return lower, upper
