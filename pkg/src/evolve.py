"""Potentials and time evolution: Strang split-step and Crank-Nicolson.

Split-step advances one step as half a potential kick, a full kinetic drift
in k-space, then the other half kick. It works in 1D and 2D. Crank-Nicolson
solves ``(I + i dt/2hbar H) psi' = (I - i dt/2hbar H) psi`` with the periodic
second-difference Laplacian and is 1D only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import fft, sparse
from scipy.sparse.linalg import splu

from src.config import InitialStateSpec, PotentialSpec
from src.core import (
    ComplexArray,
    ConstantsSet,
    Grid,
    RealArray,
    SpatialGrid,
    SpatialGrid2D,
    WaveFunction,
    gaussian_packet,
    gaussian_packet_2d,
    plane_wave_box,
    require_1d,
)
from src.errors import (
    BadPotentialSpec,
    GridMismatch,
    InvalidTimeStep,
    KindRequires2D,
    SnapshotScheduleInvalid,
)
from src.observe import ObservableReport, observables

logger = logging.getLogger("wavelab.evolve")

Scheme = Literal["split_step", "crank_nicolson"]
SCHEMES: tuple[Scheme, ...] = ("split_step", "crank_nicolson")


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Potential:
    """Real potential sampled on *grid*."""

    kind: str
    grid: Grid
    values: RealArray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise GridMismatch(f"potential of shape {values.shape} on grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise BadPotentialSpec(f"{self.kind} potential has non-finite samples")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def _param(spec: PotentialSpec, name: str) -> float:
    value = getattr(spec, name)
    if value is None:
        raise BadPotentialSpec(f"potential.{name} is required for type '{spec.type}'")
    return float(value)


def _double_slit(spec: PotentialSpec, grid: SpatialGrid2D) -> RealArray:
    height = _param(spec, "barrier_height")
    thickness = _param(spec, "barrier_thickness")
    separation = _param(spec, "slit_separation")
    slit = _param(spec, "slit_width")
    if slit >= separation:
        raise BadPotentialSpec("potential.slit_width must be smaller than potential.slit_separation")
    x, y = grid.x, grid.y
    wall = np.abs(x - spec.barrier_x) < thickness / 2.0
    upper = np.abs(y - separation / 2.0) < slit / 2.0
    lower = np.abs(y + separation / 2.0) < slit / 2.0
    opening = np.zeros(grid.shape, dtype=bool)
    if spec.closed_slit != "upper":
        opening |= upper
    if spec.closed_slit != "lower":
        opening |= lower
    return np.where(wall & ~opening, height, 0.0)


def build_potential(spec: PotentialSpec, grid: Grid, constants: ConstantsSet) -> Potential:
    """Sample the potential described by *spec* on *grid*.

    Box-like kinds act along ``x`` only; ``harmonic`` is radial in 2D.
    """
    x = grid.x
    if spec.type == "free":
        values = np.zeros(grid.shape)
    elif spec.type == "harmonic":
        omega = _param(spec, "omega")
        r_squared = (x - spec.center) ** 2
        if isinstance(grid, SpatialGrid2D):
            r_squared = r_squared + grid.y**2
        values = 0.5 * constants.mass * omega**2 * r_squared
    elif spec.type == "square_well":
        depth = _param(spec, "depth")
        width = _param(spec, "width")
        values = np.where(np.abs(x - spec.center) < width / 2.0, -depth, 0.0)
    elif spec.type == "barrier":
        height = _param(spec, "height")
        width = _param(spec, "width")
        values = np.where(np.abs(x - spec.center) <= width / 2.0, height, 0.0)
    elif spec.type == "double_slit":
        if not isinstance(grid, SpatialGrid2D):
            raise KindRequires2D("potential type 'double_slit' needs a 2D grid (grid.ymin/ymax/ny)")
        values = _double_slit(spec, grid)
    elif spec.type == "tabulated":
        if spec.values is None:
            raise BadPotentialSpec("potential.values is required for type 'tabulated'")
        table = np.asarray(spec.values, dtype=np.float64)
        if table.size != int(np.prod(grid.shape)):
            raise BadPotentialSpec(
                f"potential.values has {table.size} entries, grid has {int(np.prod(grid.shape))}"
            )
        values = table.reshape(grid.shape)
    else:
        raise BadPotentialSpec(f"unknown potential type {spec.type!r}")
    return Potential(kind=spec.type, grid=grid, values=values)


def build_initial_state(spec: InitialStateSpec, grid: Grid, constants: ConstantsSet) -> WaveFunction:
    if spec.type == "plane_wave":
        return plane_wave_box(require_1d(grid, "initial.type 'plane_wave'"), spec.mode)
    if isinstance(grid, SpatialGrid2D):
        sigma_y = spec.sigma_y if spec.sigma_y is not None else spec.sigma
        return gaussian_packet_2d(
            grid, spec.x0, spec.y0, spec.p0, spec.p0y, spec.sigma, sigma_y, constants
        )
    return gaussian_packet(grid, spec.x0, spec.p0, spec.sigma, constants)


def suggested_dt(grid: Grid, constants: ConstantsSet, max_phase: float = 0.1) -> float:
    """Step that keeps the kinetic phase of the highest grid mode below *max_phase*."""
    k_max_squared = float(np.max(grid.k_squared))
    return max_phase * 2.0 * constants.mass / (constants.hbar * k_max_squared)


# ---------------------------------------------------------------------------
# Propagators
# ---------------------------------------------------------------------------


class SplitStepPropagator:
    """Fixed-step Strang propagator; phase factors are computed once.

    An optional real *absorber* mask multiplies the state after every step.
    """

    def __init__(
        self,
        grid: Grid,
        potential: RealArray,
        dt: float,
        constants: ConstantsSet,
        absorber: RealArray | None = None,
    ) -> None:
        if not dt > 0:
            raise InvalidTimeStep(f"dt must be positive, got {dt}")
        potential = np.asarray(potential, dtype=np.float64)
        if potential.shape != grid.shape:
            raise GridMismatch(f"potential of shape {potential.shape} on grid {grid.shape}")
        self.grid = grid
        self.dt = dt
        self.half_kick = np.exp(-0.5j * potential * dt / constants.hbar)
        self.drift = np.exp(-0.5j * constants.hbar * grid.k_squared * dt / constants.mass)
        self.absorber = absorber

    def step(self, amplitudes: ComplexArray) -> ComplexArray:
        psi = self.half_kick * amplitudes
        psi = fft.ifftn(self.drift * fft.fftn(psi))
        psi *= self.half_kick
        if self.absorber is not None:
            psi *= self.absorber
        return psi

    def run(self, amplitudes: ComplexArray, steps: int) -> ComplexArray:
        psi = np.asarray(amplitudes, dtype=np.complex128)
        for _ in range(steps):
            psi = self.step(psi)
        return psi


def periodic_hamiltonian(grid: SpatialGrid, potential: RealArray, constants: ConstantsSet) -> sparse.csc_matrix:
    """``-hbar^2/2m D2 + diag(V)`` with D2 the periodic second difference."""
    n = grid.n
    ones = np.ones(n)
    second_difference = sparse.diags(
        [ones[:-1], -2.0 * ones, ones[:-1], ones[:1], ones[:1]],
        [-1, 0, 1, n - 1, -(n - 1)],
        shape=(n, n),
    )
    kinetic = -(constants.hbar**2) / (2.0 * constants.mass * grid.dx**2) * second_difference
    return (kinetic + sparse.diags(np.asarray(potential, dtype=np.float64))).tocsc()


class CrankNicolsonPropagator:
    """Fixed-step Crank-Nicolson; the implicit matrix is LU-factored once."""

    def __init__(self, grid: Grid, potential: RealArray, dt: float, constants: ConstantsSet) -> None:
        grid = require_1d(grid, "crank_nicolson")
        if not dt > 0:
            raise InvalidTimeStep(f"dt must be positive, got {dt}")
        hamiltonian = periodic_hamiltonian(grid, potential, constants)
        identity = sparse.identity(grid.n, dtype=np.complex128, format="csc")
        half = 0.5j * dt / constants.hbar
        self.grid = grid
        self.dt = dt
        self._explicit = (identity - half * hamiltonian).tocsr()
        self._implicit = splu((identity + half * hamiltonian).tocsc())

    def step(self, amplitudes: ComplexArray) -> ComplexArray:
        return self._implicit.solve(self._explicit @ amplitudes)

    def run(self, amplitudes: ComplexArray, steps: int) -> ComplexArray:
        psi = np.asarray(amplitudes, dtype=np.complex128)
        for _ in range(steps):
            psi = self.step(psi)
        return psi


def _check_step(psi: WaveFunction, potential: Potential, dt: float) -> None:
    if potential.grid != psi.grid:
        raise GridMismatch("potential and wave function live on different grids")
    if dt < 0:
        raise InvalidTimeStep(f"dt must be non-negative, got {dt}")


def split_step(psi: WaveFunction, potential: Potential, dt: float, constants: ConstantsSet) -> WaveFunction:
    """Advance *psi* by one Strang step of length *dt* (``dt == 0`` is the identity)."""
    _check_step(psi, potential, dt)
    if dt == 0:
        return psi
    propagator = SplitStepPropagator(psi.grid, potential.values, dt, constants)
    return psi.with_amplitudes(propagator.step(psi.amplitudes), psi.t + dt)


def crank_nicolson_step(
    psi: WaveFunction, potential: Potential, dt: float, constants: ConstantsSet
) -> WaveFunction:
    """Advance a 1D state by one Crank-Nicolson step."""
    require_1d(psi.grid, "crank_nicolson")
    _check_step(psi, potential, dt)
    if dt == 0:
        return psi
    propagator = CrankNicolsonPropagator(psi.grid, potential.values, dt, constants)
    return psi.with_amplitudes(propagator.step(psi.amplitudes), psi.t + dt)


def make_propagator(
    scheme: Scheme, grid: Grid, potential: Potential, dt: float, constants: ConstantsSet
) -> SplitStepPropagator | CrankNicolsonPropagator:
    if scheme == "split_step":
        return SplitStepPropagator(grid, potential.values, dt, constants)
    if scheme == "crank_nicolson":
        return CrankNicolsonPropagator(grid, potential.values, dt, constants)
    raise InvalidTimeStep(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    grid: Grid
    constants: ConstantsSet
    potential: PotentialSpec
    initial: InitialStateSpec
    dt: float
    steps: int
    snapshot_every: int = 0
    scheme: Scheme = "split_step"
    series_every: int = 1


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Column arrays of observables recorded during a run."""

    COLUMNS = ("t", "norm", "x_mean", "p_mean", "x_var", "p_var", "kinetic", "potential", "total")

    t: RealArray
    norm: RealArray
    x_mean: RealArray
    p_mean: RealArray
    x_var: RealArray
    p_var: RealArray
    kinetic: RealArray
    potential: RealArray
    total: RealArray

    @classmethod
    def from_reports(cls, times: list[float], reports: list[ObservableReport]) -> ObservableSeries:
        def column(name: str) -> RealArray:
            return np.array([getattr(report, name) for report in reports], dtype=np.float64)

        return cls(
            t=np.array(times, dtype=np.float64),
            norm=column("norm"),
            x_mean=column("x_mean"),
            p_mean=column("p_mean"),
            x_var=column("x_var"),
            p_var=column("p_var"),
            kinetic=column("kinetic_energy"),
            potential=column("potential_energy"),
            total=column("total_energy"),
        )

    @classmethod
    def from_table(cls, table: RealArray) -> ObservableSeries:
        table = np.atleast_2d(np.asarray(table, dtype=np.float64))
        return cls(**{name: table[:, i].copy() for i, name in enumerate(cls.COLUMNS)})

    def as_table(self) -> RealArray:
        return np.column_stack([getattr(self, name) for name in self.COLUMNS])

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True, eq=False)
class Trajectory:
    snapshots: tuple[WaveFunction, ...]
    series: ObservableSeries
    potential: Potential

    @property
    def final(self) -> WaveFunction:
        return self.snapshots[-1]


def check_schedule(config: SimConfig) -> None:
    if not config.dt > 0:
        raise InvalidTimeStep(f"dt must be positive, got {config.dt}")
    if config.steps < 1:
        raise SnapshotScheduleInvalid(f"steps must be at least 1, got {config.steps}")
    if config.snapshot_every < 0 or config.series_every < 1:
        raise SnapshotScheduleInvalid("snapshot_every must be >= 0 and series_every >= 1")
    if config.snapshot_every and config.steps % config.snapshot_every:
        raise SnapshotScheduleInvalid(
            f"snapshot_every ({config.snapshot_every}) must divide steps ({config.steps})"
        )


def prepare(config: SimConfig) -> tuple[Potential, WaveFunction]:
    """Validate *config* and build its potential and initial state without stepping."""
    check_schedule(config)
    potential = build_potential(config.potential, config.grid, config.constants)
    psi0 = build_initial_state(config.initial, config.grid, config.constants)
    if config.scheme == "crank_nicolson":
        require_1d(config.grid, "crank_nicolson")
    limit = suggested_dt(config.grid, config.constants)
    if config.dt > limit:
        logger.warning(
            "dt=%g exceeds %.3g, the step that keeps the highest grid mode within 0.1 rad; "
            "results may be inaccurate",
            config.dt,
            limit,
        )
    return potential, psi0


def evolve(config: SimConfig) -> Trajectory:
    """Run *config* to completion.

    Snapshots are kept at step 0 and every ``snapshot_every`` steps, or only
    at the final step when ``snapshot_every`` is 0. Observables are recorded
    at step 0, every ``series_every`` steps, and at the final step.
    """
    potential, psi0 = prepare(config)
    constants = config.constants
    propagator = make_propagator(config.scheme, config.grid, potential, config.dt, constants)
    logger.info(
        "Evolving %s state in %s potential: %d steps of dt=%g (%s)",
        config.initial.type,
        potential.kind,
        config.steps,
        config.dt,
        config.scheme,
    )

    snapshots: list[WaveFunction] = [psi0] if config.snapshot_every else []
    times: list[float] = [0.0]
    reports: list[ObservableReport] = [observables(psi0, potential, constants)]
    amplitudes = psi0.amplitudes
    for step in range(1, config.steps + 1):
        amplitudes = propagator.step(amplitudes)
        t = step * config.dt
        last = step == config.steps
        keep = step % config.snapshot_every == 0 if config.snapshot_every else last
        record = step % config.series_every == 0 or last
        if keep or record:
            psi = WaveFunction(config.grid, amplitudes, t)
            if keep:
                snapshots.append(psi)
            if record:
                times.append(t)
                reports.append(observables(psi, potential, constants))

    series = ObservableSeries.from_reports(times, reports)
    logger.info(
        "Finished at t=%g: max norm drift %.3g, max energy drift %.3g",
        times[-1],
        float(np.max(np.abs(series.norm - series.norm[0]))),
        float(np.max(np.abs(series.total - series.total[0]))),
    )
    return Trajectory(snapshots=tuple(snapshots), series=series, potential=potential)
