"""Domain errors.

Every error names the mathematical relation it found violated, so the CLI can
render messages like ``[coframe duality E^a(E_b) = δ^a_b] det = 3e-12``.
"""
from typing import Optional


class DislocationGeometryError(Exception):
    """Base class for all domain errors."""

    relation: str = "unspecified relation"

    def __init__(self, message: str, relation: Optional[str] = None):
        if relation is not None:
            self.relation = relation
        self.detail = message
        super().__init__(f"[{self.relation}] {message}")


# --- geometry core ---

class PointOutsideChart(DislocationGeometryError):
    relation = "evaluation inside the chart box"


class StencilOutOfRange(DislocationGeometryError):
    relation = "finite-difference stencil inside the sampled grid"


class VanishingField(DislocationGeometryError):
    relation = "integral curve of a non-vanishing field"


class ExitedDomain(DislocationGeometryError):
    relation = "trajectory stays inside the chart"


class DegeneratePatch(DislocationGeometryError):
    relation = "non-degenerate surface element ∂u × ∂v ≠ 0"


class FieldValidationError(DislocationGeometryError):
    relation = "analytic partials agree with central differences"


# --- frames and metric ---

class SingularCoframe(DislocationGeometryError):
    relation = "coframe duality E^a(E_b) = δ^a_b with det(e^a_A) > 0"


class SingularMetric(DislocationGeometryError):
    relation = "positive-definite metric g_AB = δ_ab e^a_A e^b_B"


# --- dislocation density and Burgers vectors ---

class ReconstructionFailure(DislocationGeometryError):
    relation = "torsion reconstruction εC_ab^c = t_[a δ_b]^c − e_abd γ^dc"


class NonPositiveDensity(DislocationGeometryError):
    relation = "positive scalar dislocation density ρ > 0"


class OpenPath(DislocationGeometryError):
    relation = "Burgers circuit is a closed contour"


class ZeroBurgers(DislocationGeometryError):
    relation = "local Burgers vector ρb = lα is non-zero"


class UndefinedBurgersDirection(DislocationGeometryError):
    relation = "Burgers direction μ^a = ½ t_b l_c e^bca with μ > 0"


# --- congruences and kinematics ---

class VanishingCurvature(DislocationGeometryError):
    relation = "Frenet curvature ∇_l l = κ e2 with κ > 0"


class NotVolterra(DislocationGeometryError):
    relation = "slip-plane condition b·n = 0"


class PatternMismatch(DislocationGeometryError):
    relation = "principal spectrum γ(−γ1⊗γ1 + γ2⊗γ2)"


class CurvatureCollapse(DislocationGeometryError):
    relation = "kinematic consistency system with κ > 0"


class ClosureMissing(DislocationGeometryError):
    relation = "closure of the kinematic consistency system"


class NonPositiveCurvature(DislocationGeometryError):
    relation = "static congruence with κ0 > 0"


# --- material flow ---

class SingularP(DislocationGeometryError):
    relation = "plastic distortion rate S_p = Ṗ P⁻¹ with det P > 0"


class JacobianCollapse(DislocationGeometryError):
    relation = "material flow Jacobian J = det(χ^A_a) > 0"


class UnsupportedRank(DislocationGeometryError):
    relation = "Lie derivative of tensors up to rank 3"


# --- glide and Orowan relations ---

class NonPositiveLeafMetric(DislocationGeometryError):
    relation = "umbilical metric Ψ a + dX³⊗dX³ with Ψ > 0 and a positive-definite"


class NotInextensible(DislocationGeometryError):
    relation = "inextensible glide planes u D_g u = 0"


class NonPositiveSpeed(DislocationGeometryError):
    relation = "Orowan relation with dislocation speed v_g > 0"


class NegativeStress(DislocationGeometryError):
    relation = "power-law speed with resolved shear stress T ≥ 0"


# --- configuration ---

class ConfigParseError(ValueError):
    """Scenario file could not be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"({', '.join(where)}) " if where else ""
        super().__init__(f"{prefix}{message}")
