"""Plastic distortion histories P(t) and the metric histories they generate."""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.config import settings
from src.exceptions import SingularP
from src.frames.bundle import MetricField, MovingFrame
from src.geometry.chart import Chart
from src.geometry.fields import AnalyticField
from src.utils import stencils, tensors
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)

TimeFunction = Callable[[np.ndarray, float], np.ndarray]


def _time_lattice(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 5:
        raise ValueError("a history needs at least 5 uniform time samples")
    steps = np.diff(times)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, abs(times[-1])):
        raise ValueError("history time samples must be increasing and uniform")
    return times


class MetricHistory:
    """Time-dependent metric g_AB(X, t) on a uniform time lattice."""

    def __init__(self, chart: Chart, metric: TimeFunction, times, rate: Optional[TimeFunction] = None,
                 name: str = "metric history"):
        self.chart = chart
        self._metric = metric
        self._rate = rate
        self.times = _time_lattice(times)
        self.name = name

    @classmethod
    def static(cls, metric: MetricField, times) -> "MetricHistory":
        return cls(metric.chart, lambda points, t: metric.metric(points), times,
                   rate=lambda points, t: np.zeros(np.shape(points)[:-1] + (3, 3)), name=metric.name)

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def metric(self, points, t: float) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.array(np.broadcast_to(self._metric(points, t), points.shape[:-1] + (3, 3)))

    def rate(self, points, t: float) -> np.ndarray:
        """∂_t g, analytic when supplied, else by 4th-order differences on the time lattice."""
        if self._rate is not None:
            return np.asarray(self._rate(points, t), dtype=float)
        return stencils.time_derivative(lambda s: self.metric(points, s), t, self.step,
                                        float(self.times[0]), float(self.times[-1]))

    def at(self, t: float) -> MetricField:
        """Frozen metric g(·, t) with partials from stencils."""
        return MetricField.from_function(self.chart, lambda points: self.metric(points, t), name=f"{self.name} @ t={t:g}")


@dataclass
class DistortionRates:
    """S_p = ṖP⁻¹ (mixed), L_p = g S_p and D_p = sym L_p at a batch of points."""
    S_p: np.ndarray
    L_p: np.ndarray
    D_p: np.ndarray
    metric_rate_residual: float


class DistortionHistory:
    """Plastic distortion P^A_a(X, t) with E_a = P C_a for the Cartesian reference frame C_a.

    The frame is e_a^A = P^A_a, the coframe e^a_A = (P⁻¹)^a_A and the metric
    g = P⁻ᵀP⁻¹.
    """

    def __init__(self, chart: Chart, P: TimeFunction, times, P_dot: Optional[TimeFunction] = None,
                 name: str = "P"):
        self.chart = chart
        self._P = P
        self._P_dot = P_dot
        self.times = _time_lattice(times)
        self.name = name
        for t in (self.times[0], self.times[-1]):
            self.P(chart.test_lattice(), float(t))

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def P(self, points, t: float) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        value = np.array(np.broadcast_to(self._P(points, t), points.shape[:-1] + (3, 3)), dtype=float)
        det = np.linalg.det(value)
        if np.any(det < 1e-10):
            raise SingularP(f"{self.name}: det P = {float(np.min(det)):.3e} at t = {t:g}")
        return value

    def P_dot(self, points, t: float) -> np.ndarray:
        if self._P_dot is not None:
            points = np.asarray(points, dtype=float)
            return np.array(np.broadcast_to(self._P_dot(points, t), points.shape[:-1] + (3, 3)), dtype=float)
        return stencils.time_derivative(lambda s: self.P(points, s), t, self.step,
                                        float(self.times[0]), float(self.times[-1]))

    def coframe_components(self, points, t: float) -> np.ndarray:
        return np.linalg.inv(self.P(points, t))

    def metric(self, points, t: float) -> np.ndarray:
        e = self.coframe_components(points, t)
        return np.einsum("...aA,...aB->...AB", e, e)

    def frame(self, t: float, epsilon: int = 1) -> MovingFrame:
        coframe = AnalyticField(self.chart, lambda points: self.coframe_components(points, t), shape=(3, 3),
                                variance=("u", "d"), name=f"coframe of {self.name} @ t={t:g}")
        return MovingFrame(coframe, epsilon)

    def metric_history(self) -> MetricHistory:
        return MetricHistory(self.chart, self.metric, self.times, name=f"metric of {self.name}")

    def plastic_rate(self, points, t: float) -> np.ndarray:
        """D_p alone, in the signature flow_consistency expects."""
        return distortion_rates(self, t, points, validate=False).D_p


def distortion_rates(history: DistortionHistory, t: float, points=None, validate: bool = True) -> DistortionRates:
    """S_p = ṖP⁻¹, L_p = g S_p and D_p = sym L_p; checks ġ + 2D_p = 0.

    Raises:
        SingularP: det P ≤ 0 at a sample.
    """
    points = history.chart.test_lattice() if points is None else np.asarray(points, dtype=float)
    P = history.P(points, t)
    S_p = history.P_dot(points, t) @ np.linalg.inv(P)
    g = history.metric(points, t)
    L_p = g @ S_p
    D_p = tensors.symmetric_part(L_p)

    residual = float("nan")
    if validate:
        g_dot = stencils.time_derivative(lambda s: history.metric(points, s), t, history.step,
                                         float(history.times[0]), float(history.times[-1]))
        residual = tensors.max_abs(g_dot + 2.0 * D_p)
        check_residual("metric rate ġ = −2D_p", residual, settings.tol("metric_rate"))
    return DistortionRates(S_p, L_p, D_p, residual)
