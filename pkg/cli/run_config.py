"""
Run configuration documents for the command-line front end.

A run is described by one JSON document with three flat blocks:

    {
      "scenario": {"profile": "gaussian", "d_over_z0": 0.8,
                   "gamma_s": 0.6, "angle_unit": "deg", "theta": 90},
      "task":     {"kind": "scan", "x_range": [-3, 3], "n": 121},
      "output":   {"format": "csv", "path": "bump_scan.csv", "precision": 9}
    }

Angles always carry an explicit "angle_unit" ("deg" or "rad"). Problems
are reported as ConfigError with the file position or the field path.
"""

import math
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import orjson
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    FiniteFloat,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from configs.config import config
from core.energy import Mode, PhysicalSetup
from core.errors import ConfigError, DomainError
from core.profile import (
    GaussianProfile,
    GratingProfile,
    Profile,
    QuadratureSpec,
    StripProfile,
    TabulatedProfile,
    load_tabulated_profile,
)
from core.response import GammaParams, Orientation, gamma_from_polarizability
from services.analysis import Family, Scenario
from utils.logger import setup_logger

logger = setup_logger(__name__)

TaskKind = Literal["eval", "scan", "map", "phase", "trap", "regime", "minima"]
# Uniaxial anisotropy of a physical particle.
GammaS = Annotated[float, Field(ge=0.0, lt=1.0)]


class ScenarioBlock(BaseModel):
    """Profile, particle, orientation and evaluation mode."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    profile: Literal["gaussian", "strip", "grating", "tabulated"]
    d_over_z0: Optional[PositiveFloat] = None
    L_over_z0: Optional[PositiveFloat] = None
    n_strips: Optional[PositiveInt] = None
    table: Optional[Path] = None
    samples: Optional[List[Tuple[FiniteFloat, FiniteFloat]]] = None
    sign: Literal[-1, 0, 1] = 1

    gamma_iso: PositiveFloat = 1.0
    gamma_s: FiniteFloat = 0.0
    gamma_a: FiniteFloat = 0.0
    polarizability: Optional[Tuple[FiniteFloat, FiniteFloat, FiniteFloat]] = None

    angle_unit: Literal["deg", "rad"]
    phi: FiniteFloat = 0.0
    theta: FiniteFloat = 0.0
    psi: FiniteFloat = 0.0

    mode: Mode = "quantum"
    approximation: Literal["exact", "pfa"] = "exact"

    rel_tol: Optional[PositiveFloat] = None
    abs_tol: Optional[PositiveFloat] = None
    u_max: Optional[float] = Field(default=None, ge=20.0)
    max_refinements: Optional[PositiveInt] = None

    @model_validator(mode="after")
    def _check_profile_fields(self) -> "ScenarioBlock":
        needed = {
            "gaussian": ("d_over_z0",),
            "strip": ("d_over_z0",),
            "grating": ("d_over_z0", "L_over_z0", "n_strips"),
            "tabulated": (),
        }[self.profile]
        missing = [name for name in needed if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.profile} profile needs {', '.join(missing)}")
        if self.profile == "tabulated" and (self.table is None) == (self.samples is None):
            raise ValueError("tabulated profile needs exactly one of table or samples")
        return self

    def orientation(self) -> Orientation:
        if self.angle_unit == "deg":
            return Orientation.from_degrees(self.phi, self.theta, self.psi)
        return Orientation(phi=self.phi, theta=self.theta, psi=self.psi)

    def gammas(self) -> GammaParams:
        if self.polarizability is not None:
            return gamma_from_polarizability(*self.polarizability)
        return GammaParams(gamma_iso=self.gamma_iso, gamma_s=self.gamma_s, gamma_a=self.gamma_a)

    def build_profile(self, base_dir: Path) -> Profile:
        if self.profile == "gaussian":
            return GaussianProfile(d_over_z0=self.d_over_z0, sign=self.sign)
        if self.profile == "strip":
            return StripProfile(d_over_z0=self.d_over_z0, sign=self.sign)
        if self.profile == "grating":
            return GratingProfile(
                d_over_z0=self.d_over_z0,
                L_over_z0=self.L_over_z0,
                n_strips=self.n_strips,
                sign=self.sign,
            )
        if self.table is not None:
            path = self.table if self.table.is_absolute() else base_dir / self.table
            return load_tabulated_profile(path, sign=self.sign)
        return TabulatedProfile(samples=tuple(map(tuple, self.samples)), sign=self.sign)

    def quadrature(self, rel_tol: Optional[float] = None) -> QuadratureSpec:
        overrides = {
            "rel_tol": rel_tol if rel_tol is not None else self.rel_tol,
            "abs_tol": self.abs_tol,
            "u_max": self.u_max,
            "max_refinements": self.max_refinements,
        }
        return QuadratureSpec(**{k: v for k, v in overrides.items() if v is not None})


class TaskBlock(BaseModel):
    """Parameters of the single operation a run performs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Optional[TaskKind] = None
    x0_over_z0: FiniteFloat = 0.0
    y0_over_z0: FiniteFloat = 0.0
    quantity: Literal["ratio", "force"] = "ratio"
    x_range: Optional[Tuple[FiniteFloat, FiniteFloat]] = None
    y_range: Optional[Tuple[FiniteFloat, FiniteFloat]] = None
    n: Optional[NonNegativeInt] = None
    nx: Optional[NonNegativeInt] = None
    ny: Optional[NonNegativeInt] = None
    grid_n: PositiveInt = 121
    family: Optional[Family] = None
    gamma_values: Optional[List[GammaS]] = None
    width_tol: PositiveFloat = 1e-6
    setup: Optional[PhysicalSetup] = None


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    format: Optional[Literal["csv", "json"]] = None
    path: Optional[Path] = None
    precision: int = Field(default_factory=lambda: config.OUTPUT_PRECISION, ge=1, le=17)


class RunConfig(BaseModel):
    """One run: a scenario, exactly one task and the output settings."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: ScenarioBlock
    task: TaskBlock = Field(default_factory=TaskBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)
    base_dir: Path = Field(default=Path("."), exclude=True)

    def build_scenario(self, rel_tol: Optional[float] = None) -> Scenario:
        """
        Validated Scenario for this run.

        Raises:
            ConfigError: If the particle or profile leaves its domain.
        """
        s = self.scenario
        try:
            return Scenario(
                profile=s.build_profile(self.base_dir),
                gammas=s.gammas(),
                orientation=s.orientation(),
                mode=s.mode,
                approximation=s.approximation,
                quad=s.quadrature(rel_tol),
            )
        except (DomainError, ValidationError, OSError) as e:
            raise ConfigError(f"scenario: {e}") from e


def format_validation_error(e: ValidationError) -> str:
    """One line per problem, prefixed with the dotted field path."""
    lines = []
    for err in e.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<document>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_run_config(raw: Union[bytes, str], source: str = "<config>", base_dir: Path = Path(".")) -> RunConfig:
    """
    Parse and validate a JSON run document.

    Raises:
        ConfigError: On malformed JSON (with line and column) or invalid fields.
    """
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    try:
        return RunConfig.model_validate({**data, "base_dir": base_dir})
    except ValidationError as e:
        raise ConfigError(f"{source}: {format_validation_error(e)}") from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read a run document from disk; relative table paths resolve against its folder."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e.strerror or e}") from e
    run = parse_run_config(raw, str(path), path.parent)
    logger.info(f"Loaded run config {path} (task {run.task.kind or 'unspecified'})")
    return run


def checked_range(
    value: Optional[Tuple[float, float]], name: str
) -> Tuple[float, float]:
    """
    Range from a task block, required and non-decreasing.

    Raises:
        ConfigError: If missing or reversed.
    """
    if value is None:
        raise ConfigError(f"task.{name} is required")
    lo, hi = value
    if lo > hi or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"task.{name} must be increasing, got [{lo}, {hi}]")
    return lo, hi
