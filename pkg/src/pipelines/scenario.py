"""Scenario files: one YAML document validated into a ScenarioConfig."""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.config import ToleranceSettings
from src.exceptions import ConfigParseError
from src.frames import ExpressionCoframe, get_coframe
from src.frames.base import CoframeSpec
from src.frames.expression import PROFILE_SYMBOLS, compile_expression, compile_point_function
from src.geometry.chart import Chart

logger = logging.getLogger(__name__)

COMMANDS = ("analyze", "burgers", "congruence", "evolve", "flow", "orowan")
FRAME_COMMANDS = ("analyze", "burgers", "congruence")

Vector = Tuple[float, float, float]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UnitsConfig(StrictModel):
    """Fixed unit convention: lengths in cm, times in s, stresses in kg/cm²."""
    length: Literal["cm"] = "cm"
    time: Literal["s"] = "s"
    stress: Literal["kg/cm^2"] = "kg/cm^2"


class ChartConfig(StrictModel):
    lower: Vector = (-1.0, -1.0, -1.0)
    upper: Vector = (1.0, 1.0, 1.0)
    cells: int = Field(32, ge=4)

    @model_validator(mode="after")
    def check_box(self):
        if any(u <= l for l, u in zip(self.lower, self.upper)):
            raise ValueError(f"upper {self.upper} must exceed lower {self.lower}")
        return self

    def build(self) -> Chart:
        return Chart(self.lower, self.upper, (self.cells,) * 3)


class FrameConfig(StrictModel):
    """A built-in coframe by name, or a 3×3 table of coframe expressions."""
    builtin: Optional[str] = None
    params: Dict[str, float] = Field(default_factory=dict)
    coframe: Optional[List[List[str]]] = None
    gridded: bool = False
    t: float = 0.0

    @model_validator(mode="after")
    def check_source(self):
        if (self.builtin is None) == (self.coframe is None):
            raise ValueError("give exactly one of 'builtin' or 'coframe'")
        if self.builtin is not None and self.builtin.lower() not in CoframeSpec.get_supported_coframes():
            raise ValueError(f"unknown built-in frame '{self.builtin}'. "
                             f"Please choose from: {', '.join(CoframeSpec.get_supported_coframes())}")
        if self.coframe is not None:
            ExpressionCoframe(self.coframe, t=self.t)
        return self

    def spec(self) -> CoframeSpec:
        if self.coframe is not None:
            return ExpressionCoframe(self.coframe, t=self.t)
        return get_coframe(self.builtin, self.params)


class AnalyzeConfig(StrictModel):
    points: Optional[List[Vector]] = None
    l: Optional[Vector] = None
    region: Optional[Tuple[Vector, Vector]] = None


class PatchConfig(StrictModel):
    origin: Vector = (-0.5, -0.5, 0.0)
    edge_u: Vector = (1.0, 0.0, 0.0)
    edge_v: Vector = (0.0, 1.0, 0.0)
    orientation: Literal[1, -1] = 1


class BurgersConfig(StrictModel):
    circuit: Optional[List[Vector]] = None
    patch: PatchConfig = Field(default_factory=PatchConfig)
    nodes: Optional[int] = Field(None, ge=2)

    @field_validator("circuit")
    @classmethod
    def check_circuit(cls, v):
        if v is not None and len(v) < 3:
            raise ValueError("a circuit needs at least 3 vertices")
        return v


class CongruenceConfig(StrictModel):
    """Frenet tracing of a frame-vector congruence, or principal congruences at one point."""
    mode: Literal["frenet", "principal"] = "frenet"
    l: Vector = (1.0, 0.0, 0.0)
    l_coordinates: Optional[List[str]] = None
    start: Vector = (0.0, 0.0, 0.0)
    length: float = Field(0.5, gt=0)
    step: float = Field(0.01, gt=0)
    samples: int = Field(8, ge=1)
    volterra: bool = True
    point: Vector = (0.1, 0.2, 0.3)
    phis: int = Field(8, ge=1)

    @field_validator("l_coordinates")
    @classmethod
    def check_l_coordinates(cls, v):
        if v is not None:
            if len(v) != 3:
                raise ValueError("l_coordinates needs 3 component expressions")
            compile_point_function(v, "congruence.l_coordinates")
        return v


class ClosureConfig(StrictModel):
    variable: Literal["omega", "zeta", "theta", "kappa"]
    expression: str

    @field_validator("expression")
    @classmethod
    def check_expression(cls, v):
        compile_expression(v, "evolve.closure.expression", symbols=PROFILE_SYMBOLS)
        return v


class StaticConfig(StrictModel):
    kappa0: float = Field(1.0, gt=0)
    omega0: float = 1.0
    zeta0: float = 0.0
    length: Optional[float] = Field(None, gt=0)
    step: float = Field(1e-3, gt=0)
    orientation: Literal[1, -1] = -1


class EvolveConfig(StrictModel):
    """Initial profiles are expressions in s; the closure an expression in s and t."""
    length: float = Field(6.283185307179586, gt=0)
    samples: int = Field(64, ge=5)
    periodic: bool = True
    kappa: str = "1"
    theta: str = "pi/2"
    zeta: str = "0"
    omega: str = "0"
    closure: Optional[ClosureConfig] = None
    steps: int = Field(20, ge=1)
    dt: float = Field(0.01, gt=0)
    complex_branch: bool = False
    static: Optional[StaticConfig] = None

    @field_validator("kappa", "theta", "zeta", "omega")
    @classmethod
    def check_profile(cls, v, info):
        compile_expression(v, f"evolve.{info.field_name}", symbols=PROFILE_SYMBOLS)
        return v


class FlowTimesConfig(StrictModel):
    start: float = 0.0
    stop: float = 1.0
    samples: int = Field(11, ge=5)

    @model_validator(mode="after")
    def check_window(self):
        if self.stop <= self.start:
            raise ValueError(f"times.stop ({self.stop}) must exceed times.start ({self.start})")
        return self


class FlowConfig(StrictModel):
    """Velocity and optional plastic distortion P as expressions in X1, X2, X3 and t."""
    velocity: List[str] = Field(default_factory=lambda: ["-X2", "X1", "0"])
    seeds: List[Vector] = Field(default_factory=lambda: [(0.5, 0.0, 0.0)])
    T: float = Field(1.0, gt=0)
    dt: float = Field(0.01, gt=0)
    distortion: Optional[List[List[str]]] = None
    times: FlowTimesConfig = Field(default_factory=FlowTimesConfig)
    closed_orbit: bool = False

    @field_validator("velocity")
    @classmethod
    def check_velocity(cls, v):
        if len(v) != 3:
            raise ValueError("velocity needs 3 component expressions")
        compile_point_function(v, "flow.velocity")
        return v

    @field_validator("distortion")
    @classmethod
    def check_distortion(cls, v):
        if v is not None and (len(v) != 3 or any(len(row) != 3 for row in v)):
            raise ValueError("distortion needs 3 rows of 3 expressions")
        if v is not None:
            compile_point_function(v, "flow.distortion")
        return v


class StressConfig(StrictModel):
    T0: float = Field(1.0, gt=0)
    n_exp: float = Field(1.0, ge=1)
    v0: float = Field(2.0, gt=0)
    tau0: float = Field(1.0, ge=0)


class OrowanConfig(StrictModel):
    h0: float = 0.5
    leaf: Literal["flat", "sphere"] = "flat"
    phi: float = 0.0
    psi: float = Field(0.0, gt=-1.5707963267948966, lt=1.5707963267948966)
    point: Vector = (0.1, 0.2, 0.0)
    stress: StressConfig = Field(default_factory=StressConfig)
    variant: Literal["directional", "aligned"] = "directional"


class ScenarioConfig(StrictModel):
    scenario: str = "scenario"
    command: Literal["analyze", "burgers", "congruence", "evolve", "flow", "orowan"]
    units: UnitsConfig = Field(default_factory=UnitsConfig)
    chart: ChartConfig = Field(default_factory=ChartConfig)
    frame: Optional[FrameConfig] = None
    epsilon: Literal[1, -1] = 1
    rho: float = Field(1.0, gt=0)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    seed: Optional[int] = None
    output_dir: Optional[str] = None
    analyze: AnalyzeConfig = Field(default_factory=AnalyzeConfig)
    burgers: BurgersConfig = Field(default_factory=BurgersConfig)
    congruence: CongruenceConfig = Field(default_factory=CongruenceConfig)
    evolve: EvolveConfig = Field(default_factory=EvolveConfig)
    flow: FlowConfig = Field(default_factory=FlowConfig)
    orowan: OrowanConfig = Field(default_factory=OrowanConfig)

    @field_validator("tolerances")
    @classmethod
    def check_tolerances(cls, v):
        known = set(ToleranceSettings.model_fields)
        unknown = sorted(set(v) - known)
        if unknown:
            raise ValueError(f"unknown tolerance(s) {', '.join(unknown)}")
        if any(value <= 0 for value in v.values()):
            raise ValueError("tolerances must be positive")
        return v

    @model_validator(mode="after")
    def check_frame(self):
        if self.command in FRAME_COMMANDS and self.frame is None:
            raise ValueError(f"command '{self.command}' needs a 'frame' section")
        return self

    def config_hash(self) -> str:
        """sha256 of the canonical JSON of the validated config."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _node_line(node: Optional[yaml.Node], path: Tuple[Union[str, int], ...]) -> Optional[int]:
    """1-based line of the YAML node at ``path``, or of its deepest existing ancestor."""
    if node is None:
        return None
    line = node.start_mark.line + 1
    for key in path:
        child = None
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == str(key):
                    child = value_node
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            child = node.value[key]
        if child is None:
            break
        node = child
        line = node.start_mark.line + 1
    return line


def parse_scenario(text: str, source: str = "<string>") -> ScenarioConfig:
    """Parse and validate a scenario document.

    Raises:
        ConfigParseError: YAML syntax error, non-mapping document or failed validation,
            with the line and dotted field path when they are known.
    """
    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigParseError(f"{source}: invalid YAML: {e}", line=None if mark is None else mark.line + 1) from e
    if not isinstance(data, dict):
        raise ConfigParseError(f"{source}: a scenario must be a mapping of sections", line=1)

    try:
        config = ScenarioConfig(**data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = tuple(part for part in error["loc"] if not isinstance(part, str) or not part.startswith("function-"))
        field = ".".join(str(part) for part in loc) or None
        raise ConfigParseError(f"{source}: {error['msg']}", line=_node_line(root, loc), field=field) from e
    except ConfigParseError as e:
        raise ConfigParseError(f"{source}: {e}", field=e.field) from e
    logger.info(f"Loaded scenario '{config.scenario}' ({config.command}) from {source}")
    return config


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"cannot read scenario file {path}: {e}") from e
    return parse_scenario(text, str(path))


def scenario_from_dict(data: Dict[str, Any]) -> ScenarioConfig:
    """Validate an in-memory scenario, as the built-in registry stores them."""
    return parse_scenario(yaml.safe_dump(data, sort_keys=False), source=str(data.get("scenario", "<dict>")))
