"""Material flow χ_t of a velocity field, its deformation gradient and strains.

Each seed carries six satellites at ±h along the coordinate axes. The
deformation gradient χ^A_a is the central difference of the satellites'
positions, integrated together with the seeds by RK4.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from src.config import settings
from src.exceptions import ExitedDomain, JacobianCollapse, PointOutsideChart
from src.frames.bundle import MetricField, MovingFrame
from src.geometry.chart import Chart
from src.geometry.fields import AnalyticField, Field
from src.utils import tensors
from src.utils.integrators import rk4_step, uniform_steps
from src.utils.validation import check_residual

logger = logging.getLogger(__name__)

JACOBIAN_FLOOR = 1e-8

Velocity = Union[Field, Callable[[np.ndarray, float], np.ndarray]]


def velocity_function(v: Velocity) -> Callable[[np.ndarray, float], np.ndarray]:
    """Uniform (points, t) signature for static fields and time-dependent callables."""
    if isinstance(v, Field):
        return lambda points, t: v.evaluate(points)
    return v


def velocity_at(v: Velocity, t: float, chart: Chart) -> Field:
    """Frozen v(·, t) as a field, with stencil partials for callables."""
    if isinstance(v, Field):
        return v
    return AnalyticField(chart, lambda points: v(points, t), shape=(3,), name=f"v @ t={t:g}")


@dataclass
class FlowState:
    """Flow of a batch of seeds over [0, T].

    ``trajectory`` is ``(steps+1, n, 3)``; ``deformation_gradient`` holds χ^A_a
    at the final time with the material index last.
    """
    seeds: np.ndarray
    times: np.ndarray
    trajectory: np.ndarray
    deformation_gradient: np.ndarray
    jacobian: np.ndarray
    G: np.ndarray
    E_p: np.ndarray
    E_p_history: np.ndarray
    jacobian_history: np.ndarray
    det_residual: float
    metric: MetricField
    h: float
    notes: List[str] = field(default_factory=list)

    @property
    def positions(self) -> np.ndarray:
        return self.trajectory[-1]

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def rows(self):
        """(t, seed, x, y, z, J, max|E_p|) per stored sample."""
        for k, t in enumerate(self.times):
            for i in range(len(self.seeds)):
                x = self.trajectory[k, i]
                yield (float(t), i, float(x[0]), float(x[1]), float(x[2]),
                       float(self.jacobian_history[k, i]), tensors.max_abs(self.E_p_history[k, i]))


def _satellites(seeds: np.ndarray, h: float) -> np.ndarray:
    """(n, 7, 3): the seed followed by ±h along X¹, X², X³."""
    offsets = np.zeros((7, 3))
    for axis in range(3):
        offsets[1 + 2 * axis, axis] = h
        offsets[2 + 2 * axis, axis] = -h
    return seeds[:, None, :] + offsets[None, :, :]


def _gradient(cloud: np.ndarray, h: float) -> np.ndarray:
    """χ^A_a from the satellites, shape (n, 3, 3)."""
    plus = cloud[:, 1::2, :]
    minus = cloud[:, 2::2, :]
    return np.swapaxes((plus - minus) / (2.0 * h), -1, -2)


def _strains(chi: np.ndarray, positions: np.ndarray, g0: np.ndarray, metric: MetricField):
    g_t = metric.metric(positions)
    G = np.einsum("...Aa,...Bb,...AB->...ab", chi, chi, g_t)
    J = np.linalg.det(chi)
    return G, 0.5 * (G - g0), J, g_t


def advance_flow(v: Velocity, seeds, T: float, dt: float, chart: Optional[Chart] = None,
                 metric: Optional[MetricField] = None, h: Optional[float] = None) -> FlowState:
    """Integrate χ_t for the seeds and build G_ab = χ^A_a χ^B_b g_AB(χ) and E_p = ½(G − g).

    Args:
        v: Velocity field, static or a callable ``(points, t)``.
        seeds: Material points ξ, shape ``(n, 3)``.
        T: Final time.
        dt: RK4 step.
        chart: Domain; taken from ``v`` when it is a field.
        metric: Static metric pulled back by the flow, flat by default.
        h: Satellite offset, ``dt`` by default.

    Raises:
        ExitedDomain: a seed or satellite leaves the chart.
        JacobianCollapse: det χ ≤ 10⁻⁸.
    """
    if chart is None:
        if not isinstance(v, Field):
            raise ValueError("advance_flow needs a chart when v is a plain callable")
        chart = v.chart
    metric = metric or MetricField.flat(chart)
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    h = h or dt
    n_steps, dt = uniform_steps(T, dt)
    velocity = velocity_function(v)

    cloud = _satellites(seeds, h)
    if not np.all(chart.contains(cloud)):
        raise ExitedDomain(f"satellites at offset h={h:g} start outside the chart")
    g0 = metric.metric(seeds)

    def rhs(t, y):
        return velocity(y, t)

    times = np.linspace(0.0, T, n_steps + 1)
    trajectory = [seeds.copy()]
    E_history = [np.zeros_like(g0)]
    J_history = [np.ones(len(seeds))]
    t = 0.0
    for k in range(n_steps):
        try:
            cloud = rk4_step(rhs, t, cloud, dt)
        except PointOutsideChart as exc:
            raise ExitedDomain(f"flow left the chart during the step from t = {t:.6g}: {exc}") from exc
        t = times[k + 1]
        inside = chart.contains(cloud)
        if not np.all(inside):
            seed = int(np.argwhere(~inside)[0][0])
            raise ExitedDomain(f"seed {seeds[seed].tolist()} left the chart at t = {t:.6g}")
        chi = _gradient(cloud, h)
        G, E_p, J, _ = _strains(chi, cloud[:, 0, :], g0, metric)
        if np.any(J <= JACOBIAN_FLOOR):
            raise JacobianCollapse(f"J = {float(np.min(J)):.3e} at t = {t:.6g}")
        trajectory.append(cloud[:, 0, :].copy())
        E_history.append(E_p)
        J_history.append(J)

    chi = _gradient(cloud, h)
    G, E_p, J, g_t = _strains(chi, cloud[:, 0, :], g0, metric)
    det_residual = tensors.max_abs((np.linalg.det(G) - J ** 2 * np.linalg.det(g_t)) / np.linalg.det(G))
    check_residual("det G = J² det g", det_residual, settings.tol("det_identity"))
    logger.info(f"Advanced {len(seeds)} seeds to T={T:g} in {n_steps} steps; min J={float(np.min(J)):.6g}")
    return FlowState(seeds=seeds, times=times, trajectory=np.stack(trajectory), deformation_gradient=chi,
                     jacobian=J, G=G, E_p=E_p, E_p_history=np.stack(E_history),
                     jacobian_history=np.stack(J_history), det_residual=det_residual, metric=metric, h=h)


def pushforward_metric(state: FlowState, g0: Optional[np.ndarray] = None):
    """g_t = (χ⁻¹)* g₀ at the current positions and the pull-back residual |χᵀ g_t χ − g₀|."""
    g0 = state.metric.metric(state.seeds) if g0 is None else np.asarray(g0, dtype=float)
    chi_inv = np.linalg.inv(state.deformation_gradient)
    g_t = np.einsum("...aA,...bB,...ab->...AB", chi_inv, chi_inv, g0)
    back = np.einsum("...Aa,...Bb,...AB->...ab", state.deformation_gradient, state.deformation_gradient, g_t)
    return g_t, tensors.max_abs(back - g0)


def coframe_transport(state: FlowState, frame0: MovingFrame, frame_T: Optional[MovingFrame] = None):
    """E^a_t = (χ_t⁻¹)* E^a_0 at the current positions.

    Returns the transported coframe components ``(n, 3, 3)`` and, when an
    independently specified ``frame_T`` is given, the largest deviation from it.
    """
    e0 = frame0.coframe_at(state.seeds)
    chi_inv = np.linalg.inv(state.deformation_gradient)
    e_t = np.einsum("...ab,...bA->...aA", e0, chi_inv)
    residual = None
    if frame_T is not None:
        residual = tensors.max_abs(e_t - frame_T.coframe_at(state.positions))
    return e_t, residual
