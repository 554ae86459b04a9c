"""Runners for the time-dependent commands: evolve, flow and orowan."""
import logging
import math

import numpy as np

from src.config import settings
from src.congruence.kinematics import (Closure, KinematicProfile, evolve_kinematics, integrate_static_congruence,
                                       static_congruence_solution)
from src.congruence.principal import principal_congruences
from src.dislocation.density import dislocation_tensor
from src.flow.consistency import flow_consistency
from src.flow.distortion import DistortionHistory, MetricHistory, distortion_rates
from src.flow.stretching import rate_of_stretchings
from src.flow.trajectories import advance_flow, pushforward_metric, velocity_at
from src.frames import get_coframe
from src.frames.bundle import MetricField, MovingFrame, build_frame_bundle
from src.frames.expression import PROFILE_SYMBOLS, compile_expression, compile_point_function
from src.geometry.fields import AnalyticField
from src.glide.orowan import (StressInput, dislocation_speed_power_law, dissipation_check, orowan_rate,
                              resolved_shear_stress, shear_relation, stress_gradient_condition)
from src.glide.slip import slip_system
from src.glide.umbilical import build_umbilical_space, killing_residual
from src.pipelines.analysis import frame_bundle
from src.pipelines.scenario import ScenarioConfig
from src.reports.writer import Report, Table, records_table
from src.utils import tensors

logger = logging.getLogger(__name__)

E3 = np.array([0.0, 0.0, 1.0])


def _profile(text: str, name: str, s: np.ndarray) -> np.ndarray:
    func = compile_expression(text, f"evolve.{name}", symbols=PROFILE_SYMBOLS)
    return np.broadcast_to(np.asarray(func(s, 0.0), dtype=float), s.shape).copy()


def run_evolve(config: ScenarioConfig, report: Report) -> None:
    block = config.evolve
    s = np.linspace(0.0, block.length, block.samples, endpoint=not block.periodic)
    initial = KinematicProfile.initial(s, _profile(block.kappa, "kappa", s), _profile(block.theta, "theta", s),
                                       _profile(block.zeta, "zeta", s), _profile(block.omega, "omega", s),
                                       periodic=block.periodic)
    closure = None
    if block.closure is not None:
        func = compile_expression(block.closure.expression, "evolve.closure.expression", symbols=PROFILE_SYMBOLS)
        closure = Closure(block.closure.variable, func)

    profile = evolve_kinematics(initial, closure, block.steps, block.dt, block.complex_branch)
    tol = settings.tol("kinematic_consistency")
    for name, value in sorted(profile.residuals.items()):
        if math.isfinite(value):
            report.check("kinematics", f"consistency_{name}", f"kinematic consistency equation {name[1:]}",
                         value, tol)
        else:
            logger.info(f"Residual {name} needs at least 5 time samples; skipped")

    if profile.closure == "theta" and np.all(np.abs(np.cos(profile.theta)) < 1e-12):
        drift = tensors.max_abs(profile.kappa - profile.kappa[0])
        report.check("kinematics", "kappa_drift", "∂_t κ = 0 where cos ϑ = 0", drift, settings.tol("kappa_drift"))

    if block.static is not None:
        _static_checks(block, profile, report)

    report.results.update(closure=profile.closure, complex_branch=block.complex_branch,
                          residuals=profile.residuals, t_final=float(profile.t[-1]),
                          kappa_range=[float(np.min(profile.kappa)), float(np.max(profile.kappa))])
    units = {"t": "s", "s": "cm", "kappa": "cm^-1", "theta": "rad", "zeta": "s^-1"}
    if profile.is_complex:
        units.update(re_omega="s^-1", im_omega="s^-1")
    else:
        units["omega"] = "s^-1"
    report.tables["profile"] = records_table(profile.rows(), units)


def _static_checks(block, profile: KinematicProfile, report: Report) -> None:
    static = block.static
    length = static.length or block.length
    s, omega, zeta = integrate_static_congruence(static.kappa0, static.omega0, static.zeta0, length, static.step,
                                                 static.orientation)
    omega_exact, zeta_exact = static_congruence_solution(static.kappa0, static.omega0, static.zeta0, s,
                                                         static.orientation)
    tol = settings.tol("static_congruence")
    report.check("kinematics", "static_closed_form", "(ω + iζ)(s) = (ω₀ + iζ₀)e^{±iκ₀s}",
                 tensors.max_abs(np.hypot(omega - omega_exact, zeta - zeta_exact)), tol)
    norm = tensors.max_abs(np.hypot(omega, zeta) - math.hypot(static.omega0, static.zeta0))
    report.check("kinematics", "static_modulus", "|ω + iζ| constant along s", norm, tol)

    if profile.closure == "theta":
        omega_p, zeta_p = static_congruence_solution(static.kappa0, static.omega0, static.zeta0, profile.s,
                                                     static.orientation)
        residual = max(tensors.max_abs(profile.omega[0] - omega_p), tensors.max_abs(profile.zeta[0] - zeta_p))
        report.check("kinematics", "static_profile", "marched (ω, ζ) match the static congruence",
                     residual, settings.tol("kinematic_consistency"))
    report.results["static"] = {"s_final": float(s[-1]), "omega_final": float(omega[-1]),
                                "zeta_final": float(zeta[-1])}


def run_flow(config: ScenarioConfig, report: Report) -> None:
    block = config.flow
    chart = config.chart.build()
    velocity = compile_point_function(block.velocity, "flow.velocity")
    metric = frame_bundle(config).metric if config.frame is not None else MetricField.flat(chart)

    state = advance_flow(velocity, block.seeds, block.T, block.dt, chart, metric)
    report.check("flow", "det_identity", "det G = J² det g", state.det_residual, settings.tol("det_identity"))
    _, pullback = pushforward_metric(state)
    report.check("flow", "pushforward", "χᵀ g_t χ = g₀", pullback, settings.tol("round_trip"))

    if block.closed_orbit:
        tol = settings.tol("closed_orbit")
        report.check("flow", "closed_orbit_return", "χ_T(ξ) = ξ on a closed orbit",
                     tensors.max_abs(state.positions - state.seeds), tol)
        report.check("flow", "closed_orbit_strain", "E_p = 0 after a full period", tensors.max_abs(state.E_p), tol)

    stretching = rate_of_stretchings(metric, velocity_at(velocity, 0.0, chart), state.seeds)
    report.check("flow", "trace_divergence", "tr_g D = div_g v", stretching.residual, settings.tol("trace_divergence"))
    max_stretching = tensors.max_abs(stretching.D)
    report.results.update(T=state.T, positions=state.positions, G=state.G, E_p=state.E_p, J=state.jacobian,
                          divergence=stretching.divergence, max_stretching=max_stretching,
                          killing=bool(max_stretching < settings.tol("killing")), notes=state.notes)

    times = np.linspace(block.times.start, block.times.stop, block.times.samples)
    lattice = chart.test_lattice()
    if block.distortion is not None:
        P = compile_point_function(block.distortion, "flow.distortion")
        history = DistortionHistory(chart, P, times)
        middle = float(times[len(times) // 2])
        rates = distortion_rates(history, middle, lattice)
        report.check("flow", "metric_rate", "ġ = −2D_p", rates.metric_rate_residual, settings.tol("metric_rate"))
        consistency = flow_consistency(history.plastic_rate, None, history.metric_history(), velocity, lattice)
    else:
        consistency = flow_consistency(None, None, MetricHistory.static(metric, times), velocity, lattice)
    report.results["consistency"] = consistency.to_dict()
    report.results.update(consistent=consistency.consistent, conservative=consistency.conservative,
                          residuals=dict(consistency.residuals))

    columns = [("t", "s"), ("seed", "1"), ("x1", "cm"), ("x2", "cm"), ("x3", "cm"), ("J", "1"), ("max_E_p", "1")]
    report.tables["trajectory"] = Table(columns, [list(row) for row in state.rows()])


def _rotate(vectors: np.ndarray, angle: float) -> np.ndarray:
    """In-plane rotation of frame vectors by ``angle`` about E₃."""
    c, s = math.cos(angle), math.sin(angle)
    out = np.array(vectors, dtype=float)
    out[..., 0] = c * vectors[..., 0] - s * vectors[..., 1]
    out[..., 1] = s * vectors[..., 0] + c * vectors[..., 1]
    return out


def run_orowan(config: ScenarioConfig, report: Report) -> None:
    block = config.orowan
    chart = config.chart.build()
    p = np.asarray(block.point, dtype=float)
    chart.require_inside(p, what="glide point")

    space = build_umbilical_space(block.h0, block.leaf, chart)
    frame = MovingFrame(space.coframe(), name=f"{block.leaf} umbilical frame")
    H = float(space.H(p[2]))
    tol = settings.tol("orowan_relation")
    report.check("glide", "christoffel", "Γ^α_β3 = −Hδ, Γ³_αβ = Hg_αβ", space.christoffel_residual(),
                 settings.tol("christoffel"))
    kn = float(space.normal_curvature(p, np.array([1.0, 0.3, 0.0])))
    report.check("glide", "normal_curvature", "κ_n(u) = H for every leaf direction", abs(kn - H),
                 settings.tol("christoffel"))
    curvature = space.gaussian_curvature()

    stress = StressInput(T0=block.stress.T0, n_exp=block.stress.n_exp, v0=block.stress.v0)
    v_g0, _ = dislocation_speed_power_law(block.stress.tau0, stress)
    w = _rotate(np.array([0.0, 1.0, 0.0]), block.phi)
    w = math.cos(block.psi) * w + math.sin(block.psi) * _rotate(np.array([1.0, 0.0, 0.0]), block.phi)

    def velocity(points):
        points = np.asarray(points, dtype=float)
        if block.leaf == "sphere":
            out = np.zeros(points.shape)
            out[..., 0] = -points[..., 1]
            out[..., 1] = points[..., 0]
            return v_g0 * np.exp(2.0 * block.h0 * points[..., 2])[..., None] * out
        coordinates = frame.to_coordinates(points, np.broadcast_to(w, points.shape))
        return v_g0 * np.exp(block.h0 * points[..., 2])[..., None] * coordinates

    def burgers_direction(points):
        """m rotated ψ ahead of the glide direction v/v_g, in frame components."""
        v_frame = frame.to_frame(points, velocity(points))
        unit = v_frame / np.linalg.norm(v_frame, axis=-1)[..., None]
        return _rotate(unit, block.psi)

    v_field = AnalyticField(chart, velocity, shape=(3,), name="v")
    m = burgers_direction(p)
    l = np.array([m[1], -m[0], 0.0])
    n = E3
    v_g = float(tensors.norm(space.g(p), velocity(p)))

    leaf_height = p[2]

    def leaf_velocity(x):
        x = np.asarray(x, dtype=float)
        points = np.concatenate([x, np.full(x.shape[:-1] + (1,), leaf_height)], axis=-1)
        return velocity(points)[..., :2]

    killing = killing_residual(space.a_leaf, leaf_velocity, chart=chart)
    report.check("glide", "killing", "leaf velocity is a Killing field of a", killing, settings.tol("killing"))

    D = rate_of_stretchings(space.metric, v_field, p).D
    slip = slip_system(D, (l, m, n), p, frame)
    gamma_dot = orowan_rate(v_g, H=H, psi_angle=block.psi, variant=block.variant)
    report.check("glide", "orowan_rate", f"{block.variant} Orowan rate equals n·D_g·m",
                 abs(gamma_dot - slip.gamma_dot) / max(1.0, abs(slip.gamma_dot)), tol,
                 hard=block.variant == "directional" or block.psi == 0.0)
    report.check("glide", "slip_obliquity", "δ_g = tan ψ", abs(slip.delta_g - math.tan(block.psi)), tol)

    def tau(points):
        return block.stress.tau0 * np.exp(block.h0 * np.asarray(points, dtype=float)[..., 2] / block.stress.n_exp)

    tau_p = float(tau(p))
    T = tau_p * (np.outer(m, n) + np.outer(n, m))
    resolved = resolved_shear_stress(T, m, n)
    v_law, gamma_law = dislocation_speed_power_law(resolved, stress, H)
    report.check("glide", "power_law_speed", "v_g = v₀(T/T₀)ⁿ along the leaf", abs(v_law - v_g) / max(1.0, v_g), tol,
                 hard=block.leaf == "flat")
    report.check("glide", "orowan_chain", "γ̇ = Hv_g with the power-law speed",
                 abs(gamma_law - orowan_rate(v_law, H=H, variant="aligned")), settings.tol("orowan_chain"))

    F = frame.frame_at(p)
    D_frame = np.einsum("aA,bB,AB->ab", F, F, D)
    dissipation = dissipation_check(T, D_frame, m=m, n=n)
    report.check("glide", "dissipation", "tr(TD_g) = 2Tγ̇", dissipation["identity_residual"],
                 settings.tol("dissipation_identity") * max(1.0, abs(dissipation["value"])))

    shear = shear_relation(space, v_field, p, slip.gamma_dot, slip.S_g)
    for name, value in shear.items():
        report.check("glide", f"shear_{name}", f"umbilical shear relation: {name}", value, tol)

    def m_coordinates(points):
        return frame.to_coordinates(points, burgers_direction(points))

    m_field = AnalyticField(chart, m_coordinates, shape=(3,), name="m")
    stress_gradient = stress_gradient_condition(space, m_field, tau, block.stress.n_exp, p)
    report.check("glide", "stress_gradient", "m_α∂₃m^α = (n/T)∂₃T", stress_gradient, tol)

    if block.leaf == "flat":
        bundle = build_frame_bundle(get_coframe("umbilical", {"h0": block.h0}).to_field(chart), name="umbilical")
        _, gamma, t = dislocation_tensor(bundle.frame).decompose(p)
        principal = principal_congruences(gamma, t, phi=block.phi)
        report.check("glide", "principal_burgers", "ρb_g = H for l = γ₃", abs(principal.rho_b_g - abs(H)),
                     settings.tol("christoffel"))
        report.check("glide", "principal_direction", "m = ρb/ρb_g from the density",
                     tensors.max_abs(principal.m - m),
                     settings.tol("classification"))
        report.results["principal"] = principal.to_dict()

    report.results.update(H=H, rho_bg=H, v_g=v_g, v_g0=v_g0, tau=tau_p, gamma_dot=slip.gamma_dot,
                          gamma_dot_orowan=gamma_dot,
                          gamma_dot_directional=orowan_rate(v_g, H=H, psi_angle=block.psi, variant="directional"),
                          gamma_dot_aligned=orowan_rate(v_g, H=H, variant="aligned"),
                          variant=block.variant, leaf=block.leaf, curvature=curvature.to_dict(),
                          slip=slip.to_dict(), dissipation=dissipation, shear=shear,
                          residuals={"killing": killing, "inextensibility": slip.inextensibility_residual,
                                     "shear_relation": max(shear["stretching_block"], shear["shear_direction"]),
                                     "stress_gradient": stress_gradient})

    heights = np.linspace(chart.lower[2], chart.upper[2], 11)[1:-1]
    rows = []
    for x3 in heights:
        q = np.array([p[0], p[1], x3])
        speed = float(tensors.norm(space.g(q), velocity(q)))
        rows.append({"X3": float(x3), "H": float(space.H(x3)), "v_g": speed, "tau": float(tau(q)),
                     "gamma_dot": float(space.H(x3)) * speed * math.cos(block.psi)})
    report.tables["glide"] = records_table(rows, {"X3": "cm", "H": "cm^-1", "v_g": "cm/s", "tau": "kg/cm^2",
                                                  "gamma_dot": "s^-1"})


__all__ = ["run_evolve", "run_flow", "run_orowan"]
