"""Run configuration: YAML files validated by Pydantic models.

Every section rejects unknown keys. Validation failures surface as
:class:`~src.errors.ConfigError` whose key reads ``section.key``.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core import ConstantsSet, Grid, constants, make_grid, make_grid_2d
from src.errors import ConfigError

if TYPE_CHECKING:
    from src.evolve import SimConfig


class _FieldError(ValueError):
    """Cross-field failure pinned to one key of its section."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(message)
        self.field = field


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridSection(_Section):
    """Sample grid; the ``y`` keys switch to a 2D grid and must come together."""

    xmin: float
    xmax: float
    n: int
    ymin: float | None = None
    ymax: float | None = None
    ny: int | None = None

    @field_validator("n", "ny")
    @classmethod
    def _power_of_two(cls, value: int | None) -> int | None:
        if value is not None and (value < 8 or value & (value - 1)):
            raise ValueError(f"must be a power of two >= 8, got {value}")
        return value

    @model_validator(mode="after")
    def _extents(self) -> GridSection:
        if not self.xmax > self.xmin:
            raise _FieldError("xmax", "xmax must exceed xmin")
        y_keys = (self.ymin, self.ymax, self.ny)
        if any(v is not None for v in y_keys) and any(v is None for v in y_keys):
            missing = next(name for name, v in zip(("ymin", "ymax", "ny"), y_keys) if v is None)
            raise _FieldError(missing, "ymin, ymax and ny must be given together")
        if self.ymin is not None and self.ymax is not None and not self.ymax > self.ymin:
            raise _FieldError("ymax", "ymax must exceed ymin")
        return self

    @property
    def is_2d(self) -> bool:
        return self.ny is not None

    def build(self) -> Grid:
        if self.ny is not None and self.ymin is not None and self.ymax is not None:
            return make_grid_2d(self.xmin, self.xmax, self.n, self.ymin, self.ymax, self.ny)
        return make_grid(self.xmin, self.xmax, self.n)


class TimeSection(_Section):
    dt: float = Field(gt=0)
    steps: int = Field(ge=1)
    snapshot_every: int = Field(default=0, ge=0)
    series_every: int = Field(default=1, ge=1)
    scheme: Literal["split_step", "crank_nicolson"] = "split_step"

    @model_validator(mode="after")
    def _schedule(self) -> TimeSection:
        if self.snapshot_every and self.steps % self.snapshot_every:
            raise _FieldError(
                "snapshot_every",
                f"snapshot_every ({self.snapshot_every}) must divide steps ({self.steps}) or be 0",
            )
        return self


class UnitsSection(_Section):
    system: Literal["natural", "si"] = "natural"


class ParticleSection(_Section):
    mass: float | None = Field(default=None, gt=0)
    hbar: float | None = Field(default=None, gt=0)


class InitialStateSpec(_Section):
    """Initial wave function: a Gaussian packet (1D or 2D) or a box plane wave."""

    type: Literal["gaussian", "plane_wave"]
    x0: float = 0.0
    p0: float = 0.0
    sigma: float = Field(default=1.0, gt=0)
    mode: int = 0
    y0: float = 0.0
    p0y: float = 0.0
    sigma_y: float | None = Field(default=None, gt=0)


class PotentialSpec(_Section):
    """Potential kind plus the parameters that kind reads.

    Per-kind required parameters are checked by ``evolve.build_potential``.
    """

    type: Literal["free", "harmonic", "square_well", "barrier", "double_slit", "tabulated"] = "free"
    omega: float | None = Field(default=None, gt=0)
    depth: float | None = Field(default=None, gt=0)
    width: float | None = Field(default=None, gt=0)
    height: float | None = Field(default=None, gt=0)
    center: float = 0.0
    barrier_height: float | None = Field(default=None, gt=0)
    barrier_x: float = 0.0
    barrier_thickness: float | None = Field(default=None, gt=0)
    slit_separation: float | None = Field(default=None, gt=0)
    slit_width: float | None = Field(default=None, gt=0)
    closed_slit: Literal["none", "upper", "lower"] = "none"
    values: tuple[float, ...] | None = None


class ScreenSpec(_Section):
    """Detector plane for the two-slit run and the optional absorbing layer."""

    x: float
    threshold: float = Field(default=1e-3, gt=0)
    absorbing_width: float = Field(default=0.0, ge=0)
    absorbing_strength: float = Field(default=0.1, gt=0, le=1)


class OutputSection(_Section):
    dir: Path | None = None
    format: Literal["csv", "binary"] = "csv"


class RunConfig(_Section):
    """A complete run description, one section per YAML mapping."""

    grid: GridSection
    time: TimeSection
    units: UnitsSection = UnitsSection()
    particle: ParticleSection = ParticleSection()
    initial: InitialStateSpec
    potential: PotentialSpec = PotentialSpec()
    screen: ScreenSpec | None = None
    output: OutputSection = OutputSection()

    def build_constants(self) -> ConstantsSet:
        return constants(self.units.system, mass=self.particle.mass, hbar=self.particle.hbar)

    def to_sim_config(self) -> SimConfig:
        from src.evolve import SimConfig

        return SimConfig(
            grid=self.grid.build(),
            constants=self.build_constants(),
            potential=self.potential,
            initial=self.initial,
            dt=self.time.dt,
            steps=self.time.steps,
            snapshot_every=self.time.snapshot_every,
            scheme=self.time.scheme,
            series_every=self.time.series_every,
        )

    def echo(self) -> dict[str, Any]:
        """Plain-data copy suitable for a YAML manifest; re-parses to an equal config."""
        return self.model_dump(mode="json", exclude_none=True)


def _error_key(error: Any) -> str:
    parts = [str(part) for part in error["loc"]]
    cause = error.get("ctx", {}).get("error")
    if isinstance(cause, _FieldError):
        parts.append(cause.field)
    return ".".join(parts) or "config"


def _error_message(error: Any) -> str:
    cause = error.get("ctx", {}).get("error")
    return str(cause) if isinstance(cause, _FieldError) else str(error["msg"])


def parse_run_config(raw: Any) -> RunConfig:
    """Validate already-loaded YAML data."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping of sections")
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(_error_key(first), _error_message(first)) from exc


def load_run_config(path: str | Path) -> RunConfig:
    """Load and validate a run configuration from a YAML file."""
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError("config", f"cannot read {config_path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"{config_path} is not valid YAML: {exc}") from exc
    return parse_run_config(raw)
