from src.flow.consistency import FlowConsistencyReport, flow_consistency
from src.flow.distortion import DistortionHistory, DistortionRates, MetricHistory, distortion_rates
from src.flow.lie import divergence, extended_lie_derivative, lie_bracket, lie_derivative, small_strain
from src.flow.stretching import Stretching, rate_of_stretchings, velocity_gradient
from src.flow.trajectories import FlowState, advance_flow, coframe_transport, pushforward_metric

__all__ = [
    "DistortionHistory", "DistortionRates", "FlowConsistencyReport", "FlowState", "MetricHistory", "Stretching",
    "advance_flow", "coframe_transport", "distortion_rates", "divergence", "extended_lie_derivative",
    "flow_consistency", "lie_bracket", "lie_derivative", "pushforward_metric", "rate_of_stretchings",
    "small_strain", "velocity_gradient",
]
