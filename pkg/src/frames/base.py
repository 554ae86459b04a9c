import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

import numpy as np

from src.geometry.chart import Chart
from src.geometry.fields import AnalyticField, Field, GriddedField

logger = logging.getLogger(__name__)


class CoframeSpec(ABC):
    """Base abstract class for coframe sources.

    A coframe spec returns the matrix ``e[a, A] = e^a_A`` of the three 1-forms
    E^a = e^a_A dX^A at a batch of points.
    """

    name: str = "coframe"

    def __init__(self, **params: Any):
        self.params: Dict[str, Any] = dict(params)

    @abstractmethod
    def components(self, points: np.ndarray) -> np.ndarray:
        """Coframe matrix e^a_A at ``points``, shape ``(..., 3, 3)``."""
        pass

    def partials(self, points: np.ndarray) -> Optional[np.ndarray]:
        """∂_B e^a_A with B last, shape ``(..., 3, 3, 3)``; None falls back to stencils."""
        return None

    @property
    def has_partials(self) -> bool:
        return type(self).partials is not CoframeSpec.partials

    def to_field(self, chart: Chart, gridded: bool = False) -> Field:
        """Coframe as a field over ``chart``, closed-form or sampled on the chart grid."""
        derivative = self.partials if self.has_partials else None
        field = AnalyticField(chart, self.components, shape=(3, 3), derivative=derivative,
                              variance=("u", "d"), name=f"{self.name} coframe")
        if gridded:
            logger.info(f"Sampling {self.name} coframe on a {chart.grid_shape} grid")
            return GriddedField.sample(field, name=f"gridded {self.name} coframe")
        return field

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "params": dict(self.params)}

    @classmethod
    def get_supported_coframes(cls) -> List[str]:
        """Names accepted by the coframe factory."""
        from src.frames.builtin import BUILTIN_COFRAMES
        return sorted(BUILTIN_COFRAMES)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"
