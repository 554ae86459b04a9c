"""Runners for the frame-based commands: analyze, burgers and congruence."""
import logging
from typing import Optional

import numpy as np

from src.config import settings
from src.exceptions import DislocationGeometryError
from src.congruence.frenet import trace_frenet
from src.congruence.principal import principal_congruences
from src.dislocation.burgers import (burgers_circuit, burgers_from_forms, burgers_surface, frame_vector_field,
                                     local_burgers_classify, stokes_residual)
from src.dislocation.density import (ScalarDensitySpec, anholonomy, dislocation_tensor, is_holonomic,
                                     total_line_length)
from src.frames.bundle import FrameBundle, build_frame_bundle
from src.frames.expression import compile_point_function
from src.geometry.curves import ParametricPatch, Polyline
from src.geometry.fields import Field, derived_field
from src.pipelines.scenario import ScenarioConfig
from src.reports.writer import Report, lattice_table, records_table
from src.utils import tensors

logger = logging.getLogger(__name__)


def frame_bundle(config: ScenarioConfig, lattice: Optional[np.ndarray] = None) -> FrameBundle:
    chart = config.chart.build()
    spec = config.frame.spec()
    coframe = spec.to_field(chart, gridded=config.frame.gridded)
    return build_frame_bundle(coframe, config.epsilon, name=spec.name, lattice=lattice)


def _unit_frame_field(bundle: FrameBundle, components, name: str) -> Field:
    components = np.asarray(components, dtype=float)
    size = float(np.linalg.norm(components))
    if size == 0.0:
        raise ValueError(f"{name} must be a non-zero frame vector")
    return frame_vector_field(bundle.frame, components / size, name=name)


def _unit_coordinate_field(bundle: FrameBundle, texts, name: str) -> Field:
    """Coordinate expressions for a direction, g-normalised pointwise."""
    func = compile_point_function(texts, name)
    metric = bundle.metric

    def unit(points):
        raw = func(points, 0.0)
        return raw / tensors.norm(metric.metric(points), raw)[..., None]

    return derived_field(bundle.chart, unit, (3,), name=name)


def run_analyze(config: ScenarioConfig, report: Report) -> None:
    lattice = config.chart.build().test_lattice()
    bundle = frame_bundle(config, lattice)
    frame, metric = bundle.frame, bundle.metric
    density = dislocation_tensor(frame, config.epsilon, lattice)

    report.check("frames", "duality", "E^a(E_b) = δ^a_b", frame.duality_residual(lattice), settings.tol("duality"))
    report.check("frames", "metric_compatibility", "∇g = 0 for the Levi-Civita connection",
                 metric.compatibility_residual(lattice), settings.tol("christoffel"))
    volume = tensors.max_abs(bundle.sqrt_g.evaluate(lattice) / metric.sqrt_det(lattice) - 1.0)
    report.check("frames", "volume_form", "det e = √det g", volume, settings.tol("duality"))
    report.check("dislocation_density", "antisymmetry", "C_ab^c = −C_ba^c",
                 anholonomy(frame).antisymmetry_residual(lattice), settings.tol("antisymmetry"))
    report.check("dislocation_density", "round_trip", "α = γ + ½ t·e",
                 density.round_trip_residual(lattice), settings.tol("round_trip"))
    report.check("dislocation_density", "trace_identity", "t_a = ε C_ab^b",
                 density.trace_identity_residual(lattice), settings.tol("trace_identity"))
    report.check("dislocation_density", "reconstruction", "εC_ab^c = t_[a δ_b]^c − e_abd γ^dc",
                 density.reconstruction_residual(lattice), settings.tol("reconstruction"))

    holonomic, max_torsion = is_holonomic(frame, settings.tol("holonomy"), lattice)
    alpha, gamma, t = density.decompose(lattice)
    report.results.update(frame=config.frame.spec().describe(), epsilon=config.epsilon,
                          is_holonomic=holonomic, max_torsion=max_torsion, max_alpha=tensors.max_abs(alpha),
                          max_gamma=tensors.max_abs(gamma), max_t=tensors.max_abs(t))

    if config.analyze.l is not None:
        rho = ScalarDensitySpec.constant(bundle.chart, config.rho)
        l = _unit_frame_field(bundle, config.analyze.l, "l")
        points = config.analyze.points or [tuple(0.5 * (bundle.chart.lower_array + bundle.chart.upper_array))]
        classified = []
        for p in points:
            local, triple = local_burgers_classify(density, l, rho, p)
            entry = {"point": list(p), **local.to_dict()}
            if triple is not None:
                sample = triple.at(np.asarray(p, dtype=float))
                entry.update(m=sample["m"], n=sample["n"])
                report.check("burgers", "volterra_gram", "(l, m, n) orthonormal with t·m = 0",
                             triple.gram_residual(np.asarray(p, dtype=float)), settings.tol("orthonormality"))
            classified.append(entry)
        report.results["local_burgers"] = classified

    if config.analyze.region is not None:
        rho = ScalarDensitySpec.constant(bundle.chart, config.rho)
        lower, upper = config.analyze.region
        report.results["total_line_length"] = total_line_length(rho, metric, (lower, upper))

    report.tables["fields"] = lattice_table(lattice, {
        "alpha": (alpha, "cm^-1"), "gamma": (gamma, "cm^-1"), "t": (t, "cm^-1"),
        "sqrt_g": (bundle.sqrt_g.evaluate(lattice), "1"),
    })


def run_burgers(config: ScenarioConfig, report: Report) -> None:
    bundle = frame_bundle(config)
    frame, chart = bundle.frame, bundle.chart
    block = config.burgers
    if block.circuit is not None:
        circuit = Polyline(np.asarray(block.circuit, dtype=float), closed=True, chart=chart)
        result = burgers_circuit(frame, circuit, block.nodes)
        report.results["circuit"] = result.to_dict()
        report.results["circuit_length"] = circuit.length
        return

    patch_config = block.patch
    patch = ParametricPatch.rectangle(patch_config.origin, patch_config.edge_u, patch_config.edge_v,
                                      patch_config.orientation, chart)
    density = dislocation_tensor(frame, config.epsilon)
    rho = ScalarDensitySpec.constant(chart, config.rho)
    circuit = burgers_circuit(frame, patch.boundary(), block.nodes)
    surface = burgers_surface(frame, density, patch, rho, block.nodes)
    forms = burgers_from_forms(frame, density.torsion.forms, patch, block.nodes)

    tol = settings.tol("stokes_gridded" if config.frame.gridded else "stokes_analytic")
    report.check("burgers", "stokes_density", "ε∮E^a = ∫α^{ba} l_b dΣ", stokes_residual(circuit, surface), tol)
    report.check("burgers", "stokes_forms", "ε∮E^a = ε∫dE^a", stokes_residual(circuit, forms), tol)
    report.results.update(circuit=circuit.to_dict(), surface=surface.to_dict(), forms=forms.to_dict())
    report.tables["burgers"] = records_table(
        [{"method": r.method, "b1": r.components[0], "b2": r.components[1], "b3": r.components[2]}
         for r in (circuit, surface, forms)],
        {"method": "1", "b1": "cm", "b2": "cm", "b3": "cm"},
    )


def run_congruence(config: ScenarioConfig, report: Report) -> None:
    if config.congruence.mode == "principal":
        _run_principal(config, report)
    else:
        _run_frenet(config, report)


def _run_frenet(config: ScenarioConfig, report: Report) -> None:
    block = config.congruence
    bundle = frame_bundle(config)
    frame, metric, chart = bundle.frame, bundle.metric, bundle.chart
    density = dislocation_tensor(frame, config.epsilon)
    rho = ScalarDensitySpec.constant(chart, config.rho)
    if block.l_coordinates is not None:
        l = _unit_coordinate_field(bundle, block.l_coordinates, "l")
    else:
        l = _unit_frame_field(bundle, block.l, "l")

    volterra, b_field = None, None
    if block.volterra:
        try:
            local, volterra = local_burgers_classify(density, l, rho, block.start)
            report.results["local_burgers"] = local.to_dict()
        except (DislocationGeometryError, ValueError) as e:
            logger.info(f"No Volterra frame at {list(block.start)}: {e}")
        if volterra is not None:
            def burgers_coordinates(points):
                l_frame = frame.to_frame(points, l.evaluate(points))
                b = np.einsum("...b,...ba->...a", l_frame, density.alpha(points)) / rho.evaluate(points)[..., None]
                return frame.to_coordinates(points, b)

            b_field = derived_field(chart, burgers_coordinates, (3,), name="b")

    trace = trace_frenet(metric, l, block.start, block.length, block.step, volterra, b_field, block.samples)
    report.check("congruence", "frenet_gram", "(e1, e2, e3) g-orthonormal", trace.max_gram_residual,
                 settings.tol("orthonormality"))
    if volterra is not None:
        complex_residual = max(s.complex_residual for s in trace.states)
        report.check("congruence", "complex_frenet", "∇_l(m + in) = −ψl", complex_residual,
                     settings.tol("complex_frenet"))
        torsion = [s.torsion_angle_residual for s in trace.states if volterra.is_edge(s.point)]
        if torsion:
            report.check("congruence", "edge_torsion", "τ = ∂_l ϑ on edge lines", max(torsion),
                         settings.tol("torsion_angle"))

    report.results.update(start=list(block.start), exited=trace.curve.exited,
                          kappa=[s.kappa for s in trace.states], tau=[s.tau for s in trace.states])
    units = {"s": "cm", "kappa": "cm^-1", "tau": "cm^-1", "theta": "rad", "re_psi": "cm^-1",
             "im_psi": "cm^-1", "climb": "cm^-1"}
    report.tables["frenet"] = records_table(trace.rows(), units)


def _run_principal(config: ScenarioConfig, report: Report) -> None:
    block = config.congruence
    bundle = frame_bundle(config)
    density = dislocation_tensor(bundle.frame, config.epsilon)
    p = np.asarray(block.point, dtype=float)
    _, gamma, t = density.decompose(p)

    rows = []
    worst = 0.0
    discrepancy = 0.0
    for phi in np.linspace(0.0, 2.0 * np.pi, block.phis, endpoint=False):
        decomposition = principal_congruences(gamma, t, phi=float(phi))
        worst = max(worst, decomposition.burgers_residual)
        discrepancy = max(discrepancy, abs(decomposition.mu_discrepancy))
        rows.append({"phi": float(phi), "H": decomposition.H, "gamma": decomposition.gamma,
                     "rho_b_g": decomposition.rho_b_g, "mu": decomposition.mu, "m_dot_k": decomposition.m_dot_k})
    report.check("congruence", "principal_burgers", "ρb = μm with m ∥ k and μ = |H| for l = γ₃", worst,
                 settings.tol("reconstruction"))
    report.check("congruence", "principal_modulus", "|ρb| = √(H² + γ²) for l = γ₃", discrepancy,
                 settings.tol("christoffel"), hard=False, detail="holds only for γ = 0")
    report.results.update(point=p, principal=principal_congruences(gamma, t, phi=0.0).to_dict())
    report.tables["principal"] = records_table(rows, {"phi": "rad", "H": "cm^-1", "gamma": "cm^-1",
                                                      "rho_b_g": "cm^-1", "mu": "cm^-1", "m_dot_k": "1"})


__all__ = ["frame_bundle", "run_analyze", "run_burgers", "run_congruence"]
