"""Consistency of a plastic flow with the crystal metric history.

A flow is consistent when the plastic rate of stretchings D_p equals the
intrinsic one D_g built from g_t and v. The transport relation uses the
extended Lie derivative L'_v g = ġ + L_v g and checks ½L'_v g = D_g − D_p.
A consistent flow is conservative when it is also volume preserving (div_g v = 0).
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from src.config import settings
from src.flow.distortion import MetricHistory
from src.flow.lie import extended_lie_derivative
from src.flow.stretching import rate_of_stretchings
from src.flow.trajectories import Velocity, velocity_at
from src.utils import tensors

logger = logging.getLogger(__name__)

RateFunction = Callable[[np.ndarray, float], np.ndarray]

RESIDUALS = ("lie_relation", "plastic_equals_intrinsic", "metric_rate", "volume_rate", "incompressibility")


@dataclass
class FlowConsistencyReport:
    residuals: Dict[str, float]
    consistent: bool
    conservative: bool
    tolerance: float
    samples: int
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def to_dict(self) -> Dict:
        return {"residuals": dict(self.residuals), "consistent": self.consistent,
                "conservative": self.conservative, "tolerance": self.tolerance,
                "samples": self.samples, "times": self.times.tolist()}


def _interior_times(history: MetricHistory, times) -> np.ndarray:
    if times is not None:
        return np.asarray(times, dtype=float)
    return history.times[2:-2:max(1, (len(history.times) - 4) // 4)]


def flow_consistency(D_p: Optional[RateFunction], D_g: Optional[RateFunction], g_history: MetricHistory,
                     v: Velocity, points=None, times=None, tol: Optional[float] = None) -> FlowConsistencyReport:
    """Residuals of the flow identities over a lattice of points and times.

    Args:
        D_p: Plastic rate of stretchings ``(points, t) -> (..., 3, 3)``; zero when None.
        D_g: Intrinsic rate of stretchings; built from g_t and v when None.
        g_history: Metric history g_t.
        v: Velocity, static field or callable ``(points, t)``.
        points: Sample points, the chart's test lattice by default.
        times: Sample times, interior lattice times by default.
        tol: Classification tolerance, ``flow_consistency`` by default.
    """
    chart = g_history.chart
    tol = settings.tol("flow_consistency") if tol is None else tol
    points = chart.test_lattice() if points is None else np.asarray(points, dtype=float)
    times = _interior_times(g_history, times)

    worst = {name: 0.0 for name in RESIDUALS}
    for t in times:
        t = float(t)
        g_t = g_history.at(t)
        v_t = velocity_at(v, t, chart)
        g_dot = g_history.rate(points, t)
        stretching = rate_of_stretchings(g_t, v_t, points)
        d_g = stretching.D if D_g is None else np.asarray(D_g(points, t), dtype=float)
        d_p = np.zeros_like(d_g) if D_p is None else np.asarray(D_p(points, t), dtype=float)

        transported = extended_lie_derivative(lambda s: g_history.at(s).g, v_t, points, t, g_history.step,
                                              float(g_history.times[0]), float(g_history.times[-1]))
        g_inv = g_t.inverse(points)
        volume_rate = 0.5 * np.einsum("...AB,...AB->...", g_inv, g_dot) + stretching.divergence

        current = {
            "lie_relation": tensors.max_abs(0.5 * transported - (d_g - d_p)),
            "plastic_equals_intrinsic": tensors.max_abs(d_p - d_g),
            "metric_rate": tensors.max_abs(g_dot + 2.0 * d_g),
            "volume_rate": tensors.max_abs(volume_rate),
            "incompressibility": tensors.max_abs(stretching.divergence),
        }
        for name, value in current.items():
            worst[name] = max(worst[name], value)
        logger.debug(f"Flow consistency at t={t:g}: {current}")

    consistent = all(worst[name] <= tol for name in ("lie_relation", "plastic_equals_intrinsic", "metric_rate"))
    conservative = consistent and worst["incompressibility"] <= tol
    logger.info(f"Flow consistency over {len(points)} points × {len(times)} times: "
                f"consistent={consistent}, conservative={conservative}")
    return FlowConsistencyReport(worst, consistent, conservative, tol, len(points) * len(times), times)
