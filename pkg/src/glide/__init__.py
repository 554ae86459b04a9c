from src.glide.orowan import (StressInput, dislocation_speed_power_law, dissipation_check, orowan_rate,
                              resolved_shear_stress, shear_relation, stress_gradient_condition)
from src.glide.slip import SlipSystem, slip_system
from src.glide.umbilical import LeafMetric, UmbilicalSpace, build_umbilical_space, classify_curvature, killing_residual

__all__ = [
    "LeafMetric", "SlipSystem", "StressInput", "UmbilicalSpace", "build_umbilical_space", "classify_curvature",
    "dislocation_speed_power_law", "dissipation_check", "killing_residual", "orowan_rate", "resolved_shear_stress",
    "shear_relation", "slip_system", "stress_gradient_condition",
]
