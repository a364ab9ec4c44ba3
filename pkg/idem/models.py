"""
Pydantic models for run parameters, reports, and experiment manifests.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MetricName = Literal["qtot", "rmse-12", "rmse-21", "chamfer", "hausdorff"]
ALL_METRICS: Tuple[str, ...] = ("qtot", "rmse-12", "rmse-21", "chamfer", "hausdorff")

SweepMode = Literal[
    "translate-axis",
    "translate-plane",
    "translate-volume",
    "rotate-axis",
    "rotate-plane",
    "rotate-volume",
]
AxisName = Literal["X", "Y", "Z"]

_MODE_DIMS = {"axis": 1, "plane": 2, "volume": 3}


class EntropyParams(BaseModel):
    """Search radius r = a * r_4th over 3D neighborhoods."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(1.0, gt=0, description="Dimensionless radius multiplier")
    r: float = Field(..., gt=0, description="Search radius in cloud units")
    N: Literal[3] = Field(3, description="Dimensionality")


class DegradationSpec(BaseModel):
    """One synthetic corruption step applied to a cloud."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["downsample", "bbox-noise", "holes", "partial-crop", "gaussian-perturb"]
    seed: int = Field(0, ge=0, lt=2**64)
    fraction: Optional[float] = Field(None, gt=0, le=1, description="downsample: kept share")
    percent: Optional[float] = Field(None, ge=0, description="bbox-noise: added points, % of n")
    seeds: Optional[int] = Field(None, ge=1, description="holes: number of seed points")
    neighbors: Optional[int] = Field(None, ge=1, description="holes: points removed per seed")
    normal: Optional[Tuple[float, float, float]] = Field(None, description="partial-crop: plane normal")
    offset: Optional[float] = Field(None, description="partial-crop: plane offset along the normal")
    keep_count: Optional[int] = Field(None, ge=5, description="partial-crop: derive offset to keep this many points")
    keep_side: Literal["positive", "negative"] = "negative"
    sigma: Optional[float] = Field(None, ge=0, description="gaussian-perturb: per-coordinate std")

    @model_validator(mode="after")
    def _kind_parameters(self):
        required = {
            "downsample": ("fraction",),
            "bbox-noise": ("percent",),
            "holes": ("seeds", "neighbors"),
            "partial-crop": ("normal",),
            "gaussian-perturb": ("sigma",),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.kind} requires {', '.join(missing)}")
        if self.kind == "partial-crop" and (self.offset is None) == (self.keep_count is None):
            raise ValueError("partial-crop requires exactly one of offset or keep_count")
        return self


class SweepSpec(BaseModel):
    """Lattice of translations or centroid rotations applied to the moving cloud."""

    model_config = ConfigDict(frozen=True)

    mode: SweepMode = "translate-plane"
    axes: Tuple[AxisName, ...] = ("X", "Y")
    range: float = Field(5.0, gt=0, description="Half extent, cloud units or degrees")
    step: float = Field(1.0, gt=0, description="Lattice spacing, cloud units or degrees")
    metrics: Tuple[MetricName, ...] = ALL_METRICS
    a: float = Field(1.0, gt=0)

    @property
    def is_rotation(self) -> bool:
        return self.mode.startswith("rotate")

    @property
    def unit(self) -> str:
        return "deg" if self.is_rotation else "length"

    @model_validator(mode="after")
    def _axes_match_mode(self):
        dims = _MODE_DIMS[self.mode.split("-")[1]]
        if len(self.axes) != dims or len(set(self.axes)) != dims:
            raise ValueError(f"mode {self.mode} needs {dims} distinct axes, got {list(self.axes)}")
        if not self.metrics:
            raise ValueError("at least one metric is required")
        if len(set(self.metrics)) != len(self.metrics):
            raise ValueError("metrics must be distinct")
        half = self.range / self.step
        if abs(half - round(half)) > 1e-9:
            raise ValueError(f"range {self.range} is not a whole number of steps {self.step}")
        return self


class RoiBounds(BaseModel):
    """Per-axis bounds of the region between the q_tot peaks."""

    model_config = ConfigDict(frozen=True)

    axes: Tuple[str, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    unit: str = "length"

    @model_validator(mode="after")
    def _brackets_zero(self):
        if not (len(self.axes) == len(self.lower) == len(self.upper)):
            raise ValueError("axes, lower and upper must have the same length")
        for axis, lo, hi in zip(self.axes, self.lower, self.upper):
            if not lo <= 0.0 <= hi:
                raise ValueError(f"bounds [{lo}, {hi}] on {axis} do not bracket zero")
        return self

    def as_dict(self) -> Dict[str, Tuple[float, float]]:
        return {a: (lo, hi) for a, lo, hi in zip(self.axes, self.lower, self.upper)}


class RegistrationConfig(BaseModel):
    """Settings for the IDEM registration loop."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(1.0, gt=0)
    roi: Literal["auto"] | Tuple[float, ...] = Field(
        "auto",
        description="'auto' or 12 numbers: tx0,tx1,ty0,ty1,tz0,tz1,rx0,rx1,ry0,ry1,rz0,rz1 (absolute pose bounds)",
    )
    optimizer: Literal["pattern-search", "nelder-mead-6d"] = "pattern-search"
    max_iters: int = Field(500, ge=1)
    q_tol: float = Field(1e-9, gt=0, description="Minimum q_tot decrease accepted as improvement")
    step_tol: float = Field(1e-3, gt=0, description="Stop when every step is below this")
    initial_translation_step: float = Field(1.0, gt=0)
    initial_rotation_step: float = Field(1.0, gt=0, description="degrees")
    initial_pose: Tuple[float, float, float, float, float, float] = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    auto_translation_range: float = Field(10.0, gt=0)
    auto_rotation_range: float = Field(30.0, gt=0)

    @field_validator("roi")
    @classmethod
    def _roi_shape(cls, v):
        if v != "auto":
            if len(v) != 12:
                raise ValueError("explicit roi needs 12 numbers")
            for lo, hi in zip(v[0::2], v[1::2]):
                if lo > hi:
                    raise ValueError(f"roi lower bound {lo} exceeds upper bound {hi}")
        return v


class MetricReport(BaseModel):
    """All metrics for one cloud pair at one pose."""

    q_tot: float
    rmse_1to2: float = Field(..., ge=0)
    rmse_2to1: float = Field(..., ge=0)
    chamfer: float = Field(..., ge=0)
    hausdorff: float = Field(..., ge=0)
    r4th_weighted: float = Field(..., gt=0)
    r: float = Field(..., gt=0)
    a: float = Field(..., gt=0)
    points: Tuple[int, int]
    pose: List[List[float]] = Field(..., description="4x4 row-major homogeneous matrix")


class SensitivityRow(BaseModel):
    sigma_noise: float = Field(..., gt=0)
    mean_qtot: float
    std_qtot: float = Field(..., ge=0)
    cv: float
    trials: int = Field(..., ge=2)
    negative_samples: int = Field(0, ge=0)


class SensitivityReport(BaseModel):
    cloud: str
    points: int
    r: float
    a: float
    trials: int = Field(..., ge=2)
    seed: int
    rows: List[SensitivityRow]


class CloudSource(BaseModel):
    """A cloud file plus an ordered chain of degradations."""

    path: str
    degradations: List[DegradationSpec] = Field(default_factory=list)
    external: bool = Field(False, description="Input not shipped with the repo; skip when absent")


class Expectation(BaseModel):
    metric: MetricName
    op: Literal["eq", "le", "ge"] = "eq"
    value: float = 0.0
    tolerance: float = Field(1e-9, ge=0)

    def holds(self, observed: float) -> bool:
        if self.op == "eq":
            return abs(observed - self.value) <= self.tolerance
        if self.op == "le":
            return observed <= self.value + self.tolerance
        return observed >= self.value - self.tolerance

    def describe(self) -> str:
        symbol = {"eq": "==", "le": "<=", "ge": ">="}[self.op]
        return f"{self.metric} error {symbol} {self.value:g}"


class Scenario(BaseModel):
    id: str = Field(..., min_length=1)
    description: str = ""
    fixed: CloudSource
    moving: CloudSource
    sweep: Optional[SweepSpec] = None
    expect: List[Expectation] = Field(default_factory=list)


class ExperimentManifest(BaseModel):
    output_dir: str = "runs/reproduce"
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    scenarios: List[Scenario] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_ids(self):
        seen = set()
        for s in self.scenarios:
            if s.id in seen:
                raise ValueError(f"duplicate scenario id {s.id!r}")
            seen.add(s.id)
        return self
