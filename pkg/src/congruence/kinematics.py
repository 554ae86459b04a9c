"""Kinematic consistency equations of moving congruences and the static congruence.

Real branch, for κ(s,t), ϑ(s,t), ζ(s,t) and a real ω(s,t):

    ∂_s ζ = ω κ sin ϑ
    ∂_t κ + cos ϑ ∂_s ω = 0
    κ(ζ − ∂_t ϑ) + sin ϑ ∂_s ω = 0

Complex branch, for ψ = κe^{iϑ} and a complex ω:

    ∂_t ψ + ∂_s ω − iζψ = 0
    ∂_s ζ = Im(ω* ψ)

Three equations bind four unknowns, so one variable is prescribed by a Closure.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import integrate

from src.exceptions import ClosureMissing, CurvatureCollapse, NonPositiveCurvature
from src.utils import stencils
from src.utils.integrators import rk4_step, uniform_steps

logger = logging.getLogger(__name__)

KAPPA_FLOOR = 1e-8
DIVISOR_FLOOR = 1e-12
CLOSURE_VARIABLES = ("omega", "zeta", "theta", "kappa")

ProfileFunction = Callable[[np.ndarray, float], np.ndarray]


@dataclass
class Closure:
    """One of κ, ϑ, ζ, ω prescribed as a function of (s, t)."""
    variable: str
    func: ProfileFunction

    def __post_init__(self):
        if self.variable not in CLOSURE_VARIABLES:
            raise ClosureMissing(f"unknown closure variable '{self.variable}', expected one of {CLOSURE_VARIABLES}")
        if not callable(self.func):
            raise ClosureMissing(f"closure for '{self.variable}' is not a function of (s, t)")

    def __call__(self, s: np.ndarray, t: float) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.func(s, t)), s.shape)

    def rate(self, s: np.ndarray, t: float, h: float = 1e-3) -> np.ndarray:
        """∂_t of the prescribed variable by the central 4th-order stencil."""
        samples = np.stack([self(s, t + o * h) for o in stencils.CENTRAL_OFFSETS])
        return np.einsum("k,k...->...", stencils.CENTRAL_WEIGHTS, samples) / h


@dataclass
class KinematicProfile:
    """Fields on a uniform (t, s) lattice; arrays have shape (len(t), len(s))."""
    s: np.ndarray
    t: np.ndarray
    kappa: np.ndarray
    theta: np.ndarray
    zeta: np.ndarray
    omega: np.ndarray
    periodic: bool = True
    closure: str = ""
    residuals: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.t = np.atleast_1d(np.asarray(self.t, dtype=float))
        shape = (len(self.t), len(self.s))
        for name in ("kappa", "theta", "zeta"):
            setattr(self, name, np.broadcast_to(np.asarray(getattr(self, name), dtype=float), shape).copy())
        omega = np.asarray(self.omega)
        dtype = complex if np.iscomplexobj(omega) else float
        self.omega = np.broadcast_to(omega.astype(dtype), shape).copy()
        if len(self.s) < 5:
            raise ValueError(f"profile needs at least 5 arclength samples, got {len(self.s)}")
        if np.any(self.kappa <= 0):
            raise CurvatureCollapse(f"min κ = {float(np.min(self.kappa)):.3e}")

    @classmethod
    def initial(cls, s, kappa, theta, zeta=0.0, omega=0.0, t0: float = 0.0, periodic: bool = True) -> "KinematicProfile":
        return cls(s, [t0], np.atleast_2d(kappa), np.atleast_2d(theta), np.atleast_2d(zeta), np.atleast_2d(omega),
                   periodic=periodic)

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.omega)

    @property
    def psi(self) -> np.ndarray:
        return self.kappa * np.exp(1j * self.theta)

    def rows(self):
        """(t, s, κ, ϑ, ζ, ω) records, ω split into real and imaginary parts when complex."""
        for i, t in enumerate(self.t):
            for j, s in enumerate(self.s):
                row = {"t": float(t), "s": float(s), "kappa": float(self.kappa[i, j]),
                       "theta": float(self.theta[i, j]), "zeta": float(self.zeta[i, j])}
                if self.is_complex:
                    row.update(re_omega=float(self.omega[i, j].real), im_omega=float(self.omega[i, j].imag))
                else:
                    row["omega"] = float(self.omega[i, j])
                yield row


def _require_curvature(kappa: np.ndarray, t: float) -> None:
    low = float(np.min(kappa))
    if low < KAPPA_FLOOR:
        raise CurvatureCollapse(f"κ = {low:.3e} at t = {t:.6g}")


def _require_nonzero(values: np.ndarray, label: str, closure: str, t: float) -> None:
    low = float(np.min(np.abs(values)))
    if low < DIVISOR_FLOOR:
        raise ClosureMissing(f"{label} = {low:.3e} at t = {t:.6g}; the {closure} closure does not determine ω there")


def _cumulative(values: np.ndarray, ds: float, start: float) -> np.ndarray:
    return start + integrate.cumulative_simpson(values, dx=ds, initial=0.0)


def _integrate_in_s(rhs: Callable[[int, float, np.ndarray], np.ndarray], n: int, ds: float,
                    start: np.ndarray) -> np.ndarray:
    """RK4 march of a lattice ODE dy/ds = rhs(j, frac, y) from node 0; frac ∈ {0, ½, 1} within cell j."""
    out = np.empty((n,) + start.shape, dtype=start.dtype)
    out[0] = start
    for j in range(n - 1):
        y = out[j]
        k1 = rhs(j, 0.0, y)
        k2 = rhs(j, 0.5, y + 0.5 * ds * k1)
        k3 = rhs(j, 0.5, y + 0.5 * ds * k2)
        k4 = rhs(j, 1.0, y + ds * k3)
        out[j + 1] = y + ds * (k1 + 2.0 * (k2 + k3) + k4) / 6.0
    return out


def _midpoint(values: np.ndarray) -> np.ndarray:
    """Cubic interpolation of lattice values to the cell midpoints, one-sided at the ends."""
    padded = np.concatenate([[4.0 * values[0] - 6.0 * values[1] + 4.0 * values[2] - values[3]], values,
                             [4.0 * values[-1] - 6.0 * values[-2] + 4.0 * values[-3] - values[-4]]])
    return (-padded[:-3] + 9.0 * padded[1:-2] + 9.0 * padded[2:-1] - padded[3:]) / 16.0


def _lattice_value(values: np.ndarray, mids: np.ndarray, j: int, frac: float):
    if frac == 0.0:
        return values[j]
    if frac == 1.0:
        return values[j + 1]
    return mids[j]


class _System:
    """Right-hand sides of the closed systems at one time level."""

    def __init__(self, closure: Closure, s: np.ndarray, periodic: bool, gauges: Dict[str, complex]):
        self.closure = closure
        self.s = s
        self.ds = float(s[1] - s[0])
        self.periodic = periodic
        self.gauges = gauges

    def d_s(self, values: np.ndarray) -> np.ndarray:
        return stencils.lattice_derivative(values, self.ds, periodic=self.periodic)

    def diagnose(self, state: np.ndarray, t: float) -> Dict[str, np.ndarray]:
        """All four fields at time t from the evolved state."""
        variable = self.closure.variable
        if variable == "omega":
            kappa, theta = state
            _require_curvature(kappa, t)
            omega = self.closure(self.s, t)
            zeta = _cumulative(omega * kappa * np.sin(theta), self.ds, self.gauges["zeta"])
            return {"kappa": kappa, "theta": theta, "zeta": zeta, "omega": omega}
        if variable == "zeta":
            kappa, theta = state
            _require_curvature(kappa, t)
            zeta = self.closure(self.s, t)
            _require_nonzero(kappa * np.sin(theta), "κ sin ϑ", "ζ", t)
            omega = self.d_s(zeta) / (kappa * np.sin(theta))
            return {"kappa": kappa, "theta": theta, "zeta": zeta, "omega": omega}
        if variable == "theta":
            (kappa,) = state
            _require_curvature(kappa, t)
            theta = self.closure(self.s, t)
            omega, zeta = self._static_march(kappa, theta, self.closure.rate(self.s, t), t)
            return {"kappa": kappa, "theta": theta, "zeta": zeta, "omega": omega}
        (theta,) = state
        kappa = self.closure(self.s, t)
        _require_curvature(kappa, t)
        _require_nonzero(np.cos(theta), "cos ϑ", "κ", t)
        omega_s = -self.closure.rate(self.s, t) / np.cos(theta)
        omega = _cumulative(omega_s, self.ds, self.gauges["omega"])
        zeta = _cumulative(omega * kappa * np.sin(theta), self.ds, self.gauges["zeta"])
        return {"kappa": kappa, "theta": theta, "zeta": zeta, "omega": omega, "omega_s": omega_s}

    def _static_march(self, kappa, theta, theta_t, t):
        """(ω, ζ) along s from ∂_s ζ = ωκ sin ϑ and ∂_s ω = κ(∂_t ϑ − ζ)/sin ϑ."""
        sin = np.sin(theta)
        _require_nonzero(sin, "sin ϑ", "ϑ", t)
        coefficient = kappa / sin
        fields = [kappa * sin, coefficient, coefficient * theta_t]
        mids = [_midpoint(f) for f in fields]

        def rhs(j, frac, y):
            ks, c, ct = (_lattice_value(f, m, j, frac) for f, m in zip(fields, mids))
            omega, zeta = y
            return np.array([ct - c * zeta, omega * ks])

        start = np.array([self.gauges["omega"], self.gauges["zeta"]], dtype=float)
        march = _integrate_in_s(rhs, len(self.s), self.ds, start)
        return march[:, 0], march[:, 1]

    def rate(self, t: float, state: np.ndarray) -> np.ndarray:
        fields = self.diagnose(state, t)
        kappa, theta, zeta, omega = fields["kappa"], fields["theta"], fields["zeta"], fields["omega"]
        variable = self.closure.variable
        if variable == "kappa":
            return np.array([zeta + np.sin(theta) * fields["omega_s"] / kappa])
        if variable == "theta":
            _require_nonzero(np.sin(theta), "sin ϑ", "ϑ", t)
            omega_s = kappa * (self.closure.rate(self.s, t) - zeta) / np.sin(theta)
            return np.array([-np.cos(theta) * omega_s])
        omega_s = self.d_s(omega)
        return np.array([-np.cos(theta) * omega_s, zeta + np.sin(theta) * omega_s / kappa])


def evolve_kinematics(initial: KinematicProfile, closure: Optional[Closure], steps: int, dt: float,
                      complex_branch: bool = False) -> KinematicProfile:
    """March the consistency system in time with classical RK4 (method of lines).

    Args:
        initial: Profile whose first time slice holds the initial data and the
            gauges ζ(s₀) and ω(s₀) for variables recovered by integration in s.
        closure: Prescribed variable.
        steps: Number of time steps.
        dt: Time step.
        complex_branch: Evolve ψ with a complex ω (ω closure only).

    Returns:
        The full profile with the a posteriori residuals in ``residuals``.

    Raises:
        ClosureMissing: no closure, or a closure the branch does not support.
        CurvatureCollapse: κ drops below 10⁻⁸.
    """
    if closure is None:
        raise ClosureMissing("the consistency system has four unknowns and three equations; prescribe one variable")
    if steps < 1 or dt <= 0:
        raise ValueError(f"need steps ≥ 1 and dt > 0, got steps={steps}, dt={dt}")
    if complex_branch:
        return _evolve_complex(initial, closure, steps, dt)

    s = initial.s
    t0 = float(initial.t[0])
    gauges = {"zeta": float(initial.zeta[0, 0]), "omega": float(np.real(initial.omega[0, 0]))}
    system = _System(closure, s, initial.periodic, gauges)
    state_names = {"omega": ("kappa", "theta"), "zeta": ("kappa", "theta"),
                   "theta": ("kappa",), "kappa": ("theta",)}[closure.variable]
    state = np.array([getattr(initial, name)[0] for name in state_names])

    times = t0 + dt * np.arange(steps + 1)
    history = [system.diagnose(state, t0)]
    for i in range(steps):
        previous = state
        state = rk4_step(system.rate, float(times[i]), state, dt)
        history.append(system.diagnose(state, float(times[i + 1])))
        if closure.variable == "theta" and np.all(np.abs(np.cos(history[-1]["theta"])) < 1e-12):
            drift = float(np.max(np.abs(state[0] - previous[0])))
            if drift > 1e-10:
                logger.warning(f"κ drifted by {drift:.3e} in a step with cos ϑ = 0")

    profile = KinematicProfile(
        s, times,
        np.array([h["kappa"] for h in history]), np.array([h["theta"] for h in history]),
        np.array([h["zeta"] for h in history]), np.array([h["omega"] for h in history]),
        periodic=initial.periodic, closure=closure.variable,
    )
    profile.residuals = max_residuals(profile)
    logger.info(f"Evolved {closure.variable}-closed profile over {steps} steps: residuals {profile.residuals}")
    return profile


def _evolve_complex(initial: KinematicProfile, closure: Closure, steps: int, dt: float) -> KinematicProfile:
    if closure.variable != "omega":
        raise ClosureMissing(f"the complex branch supports the omega closure only, got '{closure.variable}'")
    s = initial.s
    ds = float(s[1] - s[0])
    t0 = float(initial.t[0])
    zeta_gauge = float(initial.zeta[0, 0])

    def diagnose(psi, t):
        _require_curvature(np.abs(psi), t)
        omega = np.asarray(closure(s, t), dtype=complex)
        zeta = _cumulative(np.imag(np.conj(omega) * psi), ds, zeta_gauge)
        return omega, zeta

    def rate(t, psi):
        omega, zeta = diagnose(psi, t)
        return -stencils.lattice_derivative(omega, ds, periodic=initial.periodic) + 1j * zeta * psi

    times = t0 + dt * np.arange(steps + 1)
    psi = initial.psi[0].astype(complex)
    psis, omegas, zetas = [psi], [], []
    for i in range(steps):
        psi = rk4_step(rate, float(times[i]), psi, dt)
        psis.append(psi)
    for t, value in zip(times, psis):
        omega, zeta = diagnose(value, float(t))
        omegas.append(omega)
        zetas.append(zeta)

    psis = np.array(psis)
    profile = KinematicProfile(s, times, np.abs(psis), np.angle(psis), np.array(zetas), np.array(omegas),
                               periodic=initial.periodic, closure="omega")
    profile.residuals = max_residuals(profile)
    logger.info(f"Evolved complex profile over {steps} steps: residuals {profile.residuals}")
    return profile


def _time_derivative(values: np.ndarray, i: int, dt: float) -> np.ndarray:
    j = stencils.stencil_position(i, len(values) - 1)
    window = values[i - j:i - j + 5]
    return np.einsum("k,k...->...", stencils.FIVE_POINT_WEIGHTS[j], window) / dt


def consistency_residual(profile: KinematicProfile, index: int) -> Tuple[float, ...]:
    """Max-norm residuals at one time index by lattice finite differences.

    Returns (r1, r2, r3) of the real system, or (r1, r2) of the complex one.
    Time derivatives need at least 5 time samples; otherwise the rate
    residuals are NaN.
    """
    def d_s(values):
        return stencils.lattice_derivative(values, profile.ds, periodic=profile.periodic)

    kappa, theta = profile.kappa[index], profile.theta[index]
    zeta, omega = profile.zeta[index], profile.omega[index]
    has_rate = len(profile.t) >= 5

    if profile.is_complex:
        psi = profile.psi
        r2 = float(np.max(np.abs(d_s(zeta) - np.imag(np.conj(omega) * psi[index]))))
        if not has_rate:
            return float("nan"), r2
        psi_t = _time_derivative(psi, index, profile.dt)
        r1 = float(np.max(np.abs(psi_t + d_s(omega) - 1j * zeta * psi[index])))
        return r1, r2

    omega_s = d_s(omega)
    r1 = float(np.max(np.abs(d_s(zeta) - omega * kappa * np.sin(theta))))
    if not has_rate:
        return r1, float("nan"), float("nan")
    kappa_t = _time_derivative(profile.kappa, index, profile.dt)
    theta_t = _time_derivative(profile.theta, index, profile.dt)
    r2 = float(np.max(np.abs(kappa_t + np.cos(theta) * omega_s)))
    r3 = float(np.max(np.abs(kappa * (zeta - theta_t) + np.sin(theta) * omega_s)))
    return r1, r2, r3


def max_residuals(profile: KinematicProfile) -> Dict[str, float]:
    per_time = np.array([consistency_residual(profile, i) for i in range(len(profile.t))])
    return {f"r{k + 1}": float(np.nanmax(per_time[:, k])) if np.any(np.isfinite(per_time[:, k])) else float("nan")
            for k in range(per_time.shape[1])}


def static_congruence_solution(kappa0: float, omega0: float, zeta0: float, s,
                               orientation: int = -1) -> Tuple[np.ndarray, np.ndarray]:
    """Closed form (ω + iζ)(s) = (ω₀ + iζ₀) e^{i·orientation·κ₀s}.

    ``orientation`` is the sign of sin ϑ on the static congruence; the default
    −1 gives ω = ω₀cos κ₀s + ζ₀sin κ₀s, ζ = −ω₀sin κ₀s + ζ₀cos κ₀s.

    Raises:
        NonPositiveCurvature: κ₀ ≤ 0.
    """
    if kappa0 <= 0:
        raise NonPositiveCurvature(f"κ₀ = {kappa0}")
    if orientation not in (1, -1):
        raise ValueError(f"orientation must be +1 or -1, got {orientation}")
    value = (omega0 + 1j * zeta0) * np.exp(1j * orientation * kappa0 * np.asarray(s, dtype=float))
    return np.real(value), np.imag(value)


def integrate_static_congruence(kappa0: float, omega0: float, zeta0: float, length: float, step: float,
                                orientation: int = -1) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """RK4 integration of d(ω + iζ)/ds = i·orientation·κ₀(ω + iζ) from s = 0."""
    if kappa0 <= 0:
        raise NonPositiveCurvature(f"κ₀ = {kappa0}")
    n, h = uniform_steps(length, step)

    def rate(s, y):
        return 1j * orientation * kappa0 * y

    values = [complex(omega0, zeta0)]
    for i in range(n):
        values.append(rk4_step(rate, i * h, values[-1], h))
    values = np.array(values)
    return h * np.arange(n + 1), np.real(values), np.imag(values)
