"""
Pydantic schemas for experiment configs and run reports.
"""
import math
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from schemas.holography import PerturbationMode, PhaseConvention


class ExperimentName(str, Enum):
    """Experiments the runner knows how to execute"""
    BOUND = "bound"
    DISTINGUISH = "distinguish"
    LATTICE = "lattice"
    CIRCLE = "circle"
    HOLOGRAPHY = "holography"


class OutputFormat(str, Enum):
    """Results table encodings"""
    CSV = "csv"
    JSON_LINES = "json-lines"


def _split_list(v):
    """Accept '1, 10, 100' from a config file as well as real lists"""
    if isinstance(v, str):
        return [item.strip() for item in v.split(",") if item.strip()]
    if isinstance(v, (int, float)):
        return [v]
    return v


# device sizes the bound scan keeps inside float range, Planck lengths
R_MIN, R_MAX = 1e-150, 1e150
# hull size and rotation scan length grow as 1 / grid_epsilon^2
MIN_GRID_EPSILON = 0.005


class _Parameters(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class BoundParameters(_Parameters):
    """Analytic minimal angle against the brute-force (m, t) scan"""
    r: List[float] = Field(default_factory=lambda: [1.0, 10.0, 100.0], description="Device sizes, Planck lengths")
    m_grid: int = Field(256, ge=16)
    t_grid: int = Field(256, ge=16)
    m_max_factor: float = Field(10.0, gt=0.0, le=1e6)
    t_max_factor: float = Field(10.0, ge=1.0, le=1e6)
    hoop_coefficient: float = Field(1.0, gt=0.0)
    causality_coefficient: float = Field(1.0, gt=0.0)

    split_lists = field_validator("r", mode="before")(_split_list)

    @field_validator("r")
    @classmethod
    def _positive_sizes(cls, v):
        bad = [x for x in v if not x > 0]
        if bad or not v:
            raise ValueError("r > 0 required for every device size")
        if any(not (R_MIN <= x <= R_MAX) for x in v):
            raise ValueError(f"{R_MIN:g} <= r <= {R_MAX:g} required for every device size")
        return v

    @model_validator(mode="after")
    def _grid_reaches_feasible_devices(self):
        # lightest scanned mass is min(m_max_factor, 1) * r / 10, longest time t_max_factor * r
        if self.hoop_coefficient * min(self.m_max_factor, 1.0) / 10.0 >= 1.0:
            raise ValueError("hoop_coefficient * min(m_max_factor, 1) < 10 required for a feasible scan mass")
        if self.causality_coefficient * self.t_max_factor < 1.0:
            raise ValueError("causality_coefficient * t_max_factor >= 1 required for a feasible scan time")
        return self


class DistinguishParameters(_Parameters):
    """Helstrom bound against brute-force measurement search, plus snapped rotations"""
    n_angles: int = Field(9, ge=2, description="Bloch angles sampled on [0, pi]")
    mesh: int = Field(256, ge=8)
    grid_epsilon: float = Field(0.1, ge=MIN_GRID_EPSILON, le=math.pi)
    displacement: float = Field(0.001, gt=0.0, le=math.pi, description="Bloch displacement of the snapped rotation")
    states: int = Field(1000, ge=1, description="Random grid states in the snapped-rotation demo")


class LatticeParameters(_Parameters):
    """Uncertainty products and the commutator-trace obstruction on a lattice"""
    n_sites: int = Field(1024, ge=4)
    length: float = Field(100.0, gt=0.0)
    sigmas: List[float] = Field(default_factory=lambda: [5.0])
    mass: float = Field(1.0, gt=0.0)
    evolve_time: float = Field(0.0, ge=0.0)
    random_states: int = Field(1000, ge=1)
    amplitude_resolution: float = Field(0.0, ge=0.0, description="Quantize amplitudes to this step (0 disables)")
    trace_sizes: List[int] = Field(default_factory=lambda: [8, 64, 256])

    split_lists = field_validator("sigmas", "trace_sizes", mode="before")(_split_list)

    @field_validator("n_sites")
    @classmethod
    def _even_sites(cls, v):
        if v % 2:
            raise ValueError("n_sites must be even")
        return v

    @field_validator("trace_sizes")
    @classmethod
    def _even_sizes(cls, v):
        if not v or any(n < 4 or n % 2 or n > 2048 for n in v):
            raise ValueError("trace_sizes must be even integers in [4, 2048]")
        return v

    @model_validator(mode="after")
    def _resolvable_widths(self):
        if self.n_sites % 2:
            return self
        spacing = self.length / self.n_sites
        low, high = 4.0 * spacing, self.length / 8.0
        if not self.sigmas or any(not (low <= s <= high) for s in self.sigmas):
            raise ValueError(f"sigmas must lie in [4*spacing, length/8] = [{low:.6g}, {high:.6g}]")
        if 8.0 * spacing > self.length / 16.0:
            raise ValueError("lattice too coarse for the random-state sweep: need n_sites >= 128")
        # some component of a unit vector is at least 1 / sqrt(2 n) in magnitude
        limit = math.sqrt(2.0 / self.n_sites)
        if self.amplitude_resolution >= limit:
            raise ValueError(f"amplitude_resolution < sqrt(2 / n_sites) = {limit:.6g} required")
        return self


class CircleParameters(_Parameters):
    """Angular commutator [phi(0), phi(t)] on a discrete circle"""
    n_sites: int = Field(512, ge=4)
    mass: float = Field(100.0, gt=0.0)
    radius: float = Field(1.0, gt=0.0)
    sigma: float = Field(0.1, gt=0.0, le=0.4, description="Angular packet width, radians")
    p_phi: int = Field(0, description="Mean angular momentum of the packet")
    times: List[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0])

    split_lists = field_validator("times", mode="before")(_split_list)

    @field_validator("n_sites")
    @classmethod
    def _even_sites(cls, v):
        if v % 2:
            raise ValueError("n_sites must be even")
        return v

    @field_validator("times")
    @classmethod
    def _non_negative_times(cls, v):
        if len(set(v)) < 3 or any(t < 0 for t in v):
            raise ValueError("times needs at least three distinct values, each >= 0")
        return v

    @model_validator(mode="after")
    def _resolvable_width(self):
        low = 4.0 * 2.0 * math.pi / self.n_sites
        if self.sigma < low:
            raise ValueError(f"sigma must lie in [4*2pi/n_sites, 0.4] = [{low:.6g}, 0.4]")
        if abs(self.p_phi) >= self.n_sites // 4:
            raise ValueError(f"|p_phi| < n_sites/4 = {self.n_sites // 4} required")
        return self


class HolographyParameters(_Parameters):
    """n * epsilon^2 accumulation, saturation and holographic capacity"""
    epsilon: float = Field(0.01, gt=0.0, lt=1.0)
    n_values: List[int] = Field(default_factory=lambda: [10, 30, 100, 300, 1000])
    trials: int = Field(10000, ge=100)
    mode: PerturbationMode = Field(PerturbationMode.FIXED_MAGNITUDE)
    phase_convention: PhaseConvention = Field(PhaseConvention.PHASE_FREE)
    saturation_n: Optional[int] = Field(None, ge=1, le=10_000_000)
    saturation_trials: int = Field(100, ge=100)
    coupling: float = Field(1.0, gt=0.0)
    threshold: float = Field(1.0, gt=0.0)
    r: Optional[float] = Field(None, ge=1.0, description="Device size for the capacity row")

    split_lists = field_validator("n_values", mode="before")(_split_list)

    @model_validator(mode="after")
    def _small_regime(self):
        ns = self.n_values
        if len(ns) < 4 or min(ns) < 1:
            raise ValueError("n_values needs at least 4 positive entries")
        if max(ns) < 10 * min(ns):
            raise ValueError("n_values must span at least a decade (max n >= 10 * min n)")
        if max(ns) * self.epsilon ** 2 > 0.1:
            raise ValueError("n * epsilon^2 <= 0.1 required for every n in n_values")
        if self.r is not None and self.threshold * self.r ** 2 < self.coupling ** 2 * (1.0 - 1e-12):
            raise ValueError("threshold * r^2 / coupling^2 >= 1 required for a capacity row")
        if self.saturation_n is not None and self.saturation_n in ns:
            raise ValueError("saturation_n must differ from every entry of n_values")
        return self


ExperimentParameters = Union[
    BoundParameters, DistinguishParameters, LatticeParameters, CircleParameters, HolographyParameters
]

PARAMETER_MODELS = {
    ExperimentName.BOUND: BoundParameters,
    ExperimentName.DISTINGUISH: DistinguishParameters,
    ExperimentName.LATTICE: LatticeParameters,
    ExperimentName.CIRCLE: CircleParameters,
    ExperimentName.HOLOGRAPHY: HolographyParameters,
}


class ExperimentConfig(BaseModel):
    """One validated, self-describing experiment run"""
    model_config = ConfigDict(frozen=True)

    experiment: ExperimentName
    parameters: ExperimentParameters
    seed: int = Field(42, ge=0, lt=2 ** 64)
    output_path: str = Field(..., min_length=1)
    output_format: OutputFormat = Field(OutputFormat.CSV)

    def echo(self) -> Dict[str, Any]:
        """JSON-ready copy of the config for the reproducibility block"""
        return self.model_dump(mode="json")


class RunReport(BaseModel):
    """Results table plus everything needed to reproduce it"""
    tool: str
    version: str
    constants_version: str
    constants_sha256: str
    config: Dict[str, Any]
    columns: List[str]
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    generated_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    processing_time_seconds: float = Field(0.0, ge=0.0)
