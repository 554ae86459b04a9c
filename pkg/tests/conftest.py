import numpy as np
import pytest

from src.frames import build_frame_bundle, get_coframe
from src.geometry.chart import Chart

BUILTIN_PARAMS = {"holonomic": {}, "screw": {"b0": 0.1}, "edge": {"beta": 0.1}, "umbilical": {"h0": 0.5}}


@pytest.fixture
def unit_chart() -> Chart:
    """[-1, 1]³ with a coarse grid."""
    return Chart.cube(1.0, cells=8)


@pytest.fixture
def lattice(unit_chart) -> np.ndarray:
    return unit_chart.test_lattice()


@pytest.fixture
def bundle_factory(unit_chart):
    """Frame bundle of a built-in coframe with the reference parameters."""

    def build(name: str, gridded: bool = False, chart: Chart = None, epsilon: int = 1):
        chart = chart or unit_chart
        spec = get_coframe(name, BUILTIN_PARAMS[name])
        return build_frame_bundle(spec.to_field(chart, gridded=gridded), epsilon, name=name)

    return build
