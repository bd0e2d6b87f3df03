"""Unit systems, sample grids and wave functions shared by every module.

Transform convention (used everywhere a momentum-space amplitude appears)::

    phi_m = dx / sqrt(2 pi) * sum_j psi_j * exp(-i k_m x_j)

so that ``sum |psi_j|^2 dx == sum |phi_m|^2 dk`` (Parseval) with
``dk = 2 pi / L``. In 2D the prefactor is ``dx dy / (2 pi)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Literal, Union

import numpy as np
from numpy.typing import NDArray
from scipy import fft

from src import codata
from src.errors import (
    DegenerateInterval,
    GridMismatch,
    InputError,
    ModeOutOfRange,
    NaturalUnitsUnsupported,
    NonPositiveConstant,
    NonPositiveWidth,
    NonPowerOfTwo,
    Only1D,
    ZeroFunction,
)

logger = logging.getLogger("wavelab.core")

UnitSystem = Literal["natural", "si"]
RealArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

NORMALIZATION_TOLERANCE = 1e-10


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsSet:
    """Physical constants for one unit system.

    ``mass`` is the mass of the simulated particle and defaults to ``m_e``.
    In natural units only ``hbar``, ``h``, ``m_e`` and ``mass`` are defined;
    the electromagnetic constants are ``None`` and :meth:`require` refuses
    them.
    """

    unit_system: UnitSystem
    hbar: float
    h: float
    m_e: float
    mass: float
    c: float | None = None
    e_charge: float | None = None
    k_e: float | None = None
    eps0: float | None = None
    a0: float | None = None
    R_inf: float | None = None
    m_p: float | None = None
    eV: float | None = None

    def require(self, name: str) -> float:
        """Return constant *name*, refusing ones undefined in this unit system."""
        value = getattr(self, name)
        if value is None:
            raise NaturalUnitsUnsupported(
                f"{name} is not defined in {self.unit_system} units; use constants('si')"
            )
        return float(value)

    def with_particle(self, *, mass: float | None = None, hbar: float | None = None) -> ConstantsSet:
        """Copy with a different particle mass and/or a rescaled hbar."""
        updated = self
        if mass is not None:
            if not mass > 0:
                raise NonPositiveConstant(f"particle mass must be positive, got {mass}")
            updated = replace(updated, mass=float(mass))
        if hbar is not None:
            if not hbar > 0:
                raise NonPositiveConstant(f"hbar must be positive, got {hbar}")
            updated = replace(updated, hbar=float(hbar), h=2.0 * math.pi * float(hbar))
        return updated


def constants(
    unit_system: UnitSystem = "natural",
    *,
    mass: float | None = None,
    hbar: float | None = None,
) -> ConstantsSet:
    """Build the constants table for ``"natural"`` (hbar = m = 1) or ``"si"``."""
    if unit_system == "natural":
        base = ConstantsSet(
            unit_system="natural",
            hbar=1.0,
            h=2.0 * math.pi,
            m_e=1.0,
            mass=1.0,
        )
    elif unit_system == "si":
        h = codata.value("Planck constant")
        m_e = codata.value("electron mass")
        e = codata.value("elementary charge")
        eps0 = codata.value("vacuum electric permittivity")
        hbar = h / (2.0 * math.pi)
        k_e = 1.0 / (4.0 * math.pi * eps0)
        base = ConstantsSet(
            unit_system="si",
            hbar=hbar,
            h=h,
            m_e=m_e,
            mass=m_e,
            c=codata.value("speed of light in vacuum"),
            e_charge=e,
            k_e=k_e,
            eps0=eps0,
            a0=hbar**2 / (m_e * e**2 * k_e),
            R_inf=codata.value("Rydberg constant"),
            m_p=codata.value("proton mass"),
            eV=codata.value("electron volt"),
        )
    else:
        raise InputError(f"unit_system must be 'natural' or 'si', got {unit_system!r}")
    return base.with_particle(mass=mass, hbar=hbar)


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid; ``x_max`` is the image of ``x_min``, not a sample."""

    x_min: float
    x_max: float
    n: int

    ndim = 1

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,)

    @property
    def cell(self) -> float:
        """Quadrature weight of one sample."""
        return self.dx

    @property
    def k_cell(self) -> float:
        return self.dk

    @cached_property
    def x(self) -> RealArray:
        return _readonly(self.x_min + np.arange(self.n) * self.dx)

    @cached_property
    def mode_indices(self) -> NDArray[np.int64]:
        """Integer ladder ``[0, 1, ..., n/2 - 1, -n/2, ..., -1]``."""
        return _readonly(np.rint(fft.fftfreq(self.n, d=1.0 / self.n)).astype(np.int64))

    @cached_property
    def k(self) -> RealArray:
        return _readonly(self.dk * self.mode_indices.astype(np.float64))

    @cached_property
    def k_squared(self) -> RealArray:
        return _readonly(self.k**2)


@dataclass(frozen=True)
class SpatialGrid2D:
    """Two independent periodic axes: ``x`` (propagation) and ``y`` (transverse)."""

    x_axis: SpatialGrid
    y_axis: SpatialGrid

    ndim = 2

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.x_axis.n, self.y_axis.n)

    @property
    def cell(self) -> float:
        return self.x_axis.dx * self.y_axis.dx

    @property
    def k_cell(self) -> float:
        return self.x_axis.dk * self.y_axis.dk

    @cached_property
    def x(self) -> RealArray:
        """Propagation coordinate on the full mesh (``indexing="ij"``)."""
        mesh, _ = np.meshgrid(self.x_axis.x, self.y_axis.x, indexing="ij")
        return _readonly(mesh)

    @cached_property
    def y(self) -> RealArray:
        _, mesh = np.meshgrid(self.x_axis.x, self.y_axis.x, indexing="ij")
        return _readonly(mesh)

    @cached_property
    def k(self) -> RealArray:
        """Propagation-axis wavenumber on the full mesh."""
        mesh, _ = np.meshgrid(self.x_axis.k, self.y_axis.k, indexing="ij")
        return _readonly(mesh)

    @cached_property
    def k_squared(self) -> RealArray:
        kx, ky = np.meshgrid(self.x_axis.k, self.y_axis.k, indexing="ij")
        return _readonly(kx**2 + ky**2)


Grid = Union[SpatialGrid, SpatialGrid2D]


def make_grid(x_min: float, x_max: float, n: int) -> SpatialGrid:
    """Periodic grid of *n* samples on ``[x_min, x_max)``; n a power of two >= 8."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise NonPowerOfTwo(f"n must be an integer power of two, got {n!r}")
    n = int(n)
    if n < 8 or n & (n - 1):
        raise NonPowerOfTwo(f"n must be a power of two >= 8, got {n}")
    if not (math.isfinite(x_min) and math.isfinite(x_max)) or not x_max > x_min:
        raise DegenerateInterval(f"need finite x_max > x_min, got [{x_min}, {x_max}]")
    return SpatialGrid(float(x_min), float(x_max), n)


def make_grid_2d(
    x_min: float,
    x_max: float,
    nx: int,
    y_min: float,
    y_max: float,
    ny: int,
) -> SpatialGrid2D:
    return SpatialGrid2D(make_grid(x_min, x_max, nx), make_grid(y_min, y_max, ny))


def require_1d(grid: Grid, what: str) -> SpatialGrid:
    if not isinstance(grid, SpatialGrid):
        raise Only1D(f"{what} is defined on 1D grids only")
    return grid


# ---------------------------------------------------------------------------
# Wave functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Immutable snapshot of complex amplitudes on a grid at time ``t``."""

    grid: Grid
    amplitudes: ComplexArray
    t: float = 0.0
    normalized: bool = False

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != self.grid.shape:
            raise GridMismatch(
                f"{amplitudes.shape} amplitudes do not fit a grid of shape {self.grid.shape}"
            )
        object.__setattr__(self, "amplitudes", _readonly(amplitudes))
        if self.normalized:
            total = float(np.sum(np.abs(amplitudes) ** 2) * self.grid.cell)
            if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
                raise InputError(f"state marked normalized has squared norm {total!r}")

    @property
    def density(self) -> RealArray:
        return np.abs(self.amplitudes) ** 2

    def with_amplitudes(self, amplitudes: ComplexArray, t: float | None = None) -> WaveFunction:
        return WaveFunction(self.grid, amplitudes, self.t if t is None else t)

    def _check_grid(self, other: WaveFunction) -> None:
        if other.grid != self.grid:
            raise GridMismatch("wave functions live on different grids")

    def __add__(self, other: WaveFunction) -> WaveFunction:
        self._check_grid(other)
        return self.with_amplitudes(self.amplitudes + other.amplitudes)

    def __sub__(self, other: WaveFunction) -> WaveFunction:
        self._check_grid(other)
        return self.with_amplitudes(self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> WaveFunction:
        return self.with_amplitudes(self.amplitudes * scalar)

    __rmul__ = __mul__


def norm(psi: WaveFunction) -> float:
    """``(sum |psi_j|^2 dx)^(1/2)``."""
    return math.sqrt(float(np.sum(psi.density)) * psi.grid.cell)


def normalize(psi: WaveFunction) -> WaveFunction:
    current = norm(psi)
    if current == 0.0:
        raise ZeroFunction("cannot normalize the zero function")
    return WaveFunction(psi.grid, psi.amplitudes / current, psi.t, normalized=True)


def inner_product(psi: WaveFunction, phi: WaveFunction) -> complex:
    """``<psi, phi> = sum conj(psi_j) phi_j dx``."""
    psi._check_grid(phi)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes) * psi.grid.cell)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def _origin_phase(grid: Grid) -> ComplexArray:
    if isinstance(grid, SpatialGrid):
        return np.exp(-1j * grid.k * grid.x_min)
    kx, ky = np.meshgrid(grid.x_axis.k, grid.y_axis.k, indexing="ij")
    return np.exp(-1j * (kx * grid.x_axis.x_min + ky * grid.y_axis.x_min))


def _prefactor(grid: Grid) -> float:
    return grid.cell / (2.0 * math.pi) ** (grid.ndim / 2.0)


def to_momentum_space(psi: WaveFunction) -> ComplexArray:
    """Momentum amplitudes in transform ordering (see module docstring)."""
    grid = psi.grid
    return _prefactor(grid) * _origin_phase(grid) * fft.fftn(psi.amplitudes)


def from_momentum_space(grid: Grid, phi: ComplexArray, t: float = 0.0) -> WaveFunction:
    """Inverse of :func:`to_momentum_space`."""
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.shape != grid.shape:
        raise GridMismatch(f"{phi.shape} momentum amplitudes do not fit grid {grid.shape}")
    amplitudes = fft.ifftn(phi / (_prefactor(grid) * _origin_phase(grid)))
    return WaveFunction(grid, amplitudes, t)


def spectral_derivative(psi: WaveFunction, order: int = 1, axis: int = 0) -> ComplexArray:
    """``d^order psi / dx^order`` along *axis*, exact for band-limited states."""
    grid = psi.grid
    if isinstance(grid, SpatialGrid):
        k = grid.k
    else:
        k = grid.k if axis == 0 else np.meshgrid(grid.x_axis.k, grid.y_axis.k, indexing="ij")[1]
    return fft.ifftn((1j * k) ** order * fft.fftn(psi.amplitudes))


# ---------------------------------------------------------------------------
# Initial states
# ---------------------------------------------------------------------------


def gaussian_packet(
    grid: SpatialGrid,
    x0: float,
    p0: float,
    sigma0: float,
    constants: ConstantsSet,
) -> WaveFunction:
    """Normalized Gaussian with position spread *sigma0* and mean momentum *p0*."""
    grid = require_1d(grid, "gaussian_packet")
    if not sigma0 > 0:
        raise NonPositiveWidth(f"sigma0 must be positive, got {sigma0}")
    x = grid.x
    amplitudes = np.exp(-((x - x0) ** 2) / (4.0 * sigma0**2)) * np.exp(1j * p0 * x / constants.hbar)
    psi = normalize(WaveFunction(grid, amplitudes))
    edge = max(abs(psi.amplitudes[0]), abs(psi.amplitudes[-1]))
    if edge > 1e-12:
        logger.warning("Gaussian packet reaches the box edge (|psi| = %.3g); enlarge the box", edge)
    return psi


def gaussian_packet_2d(
    grid: SpatialGrid2D,
    x0: float,
    y0: float,
    p0x: float,
    p0y: float,
    sigma_x: float,
    sigma_y: float,
    constants: ConstantsSet,
) -> WaveFunction:
    """Separable 2D Gaussian beam."""
    if not isinstance(grid, SpatialGrid2D):
        raise InputError("gaussian_packet_2d needs a SpatialGrid2D")
    if not (sigma_x > 0 and sigma_y > 0):
        raise NonPositiveWidth(f"widths must be positive, got ({sigma_x}, {sigma_y})")
    x, y = grid.x, grid.y
    envelope = np.exp(-((x - x0) ** 2) / (4.0 * sigma_x**2) - (y - y0) ** 2 / (4.0 * sigma_y**2))
    carrier = np.exp(1j * (p0x * x + p0y * y) / constants.hbar)
    return normalize(WaveFunction(grid, envelope * carrier))


def plane_wave_box(
    grid: SpatialGrid,
    mode_index: int,
    t: float = 0.0,
    omega: float = 0.0,
) -> WaveFunction:
    """Box-normalized traveling wave ``L^(-1/2) exp(i(k x - omega t))``."""
    grid = require_1d(grid, "plane_wave_box")
    if isinstance(mode_index, bool) or not isinstance(mode_index, (int, np.integer)):
        raise ModeOutOfRange(f"mode_index must be an integer, got {mode_index!r}")
    if not -grid.n // 2 <= mode_index < grid.n // 2:
        raise ModeOutOfRange(f"mode {mode_index} outside [{-grid.n // 2}, {grid.n // 2})")
    k = grid.dk * int(mode_index)
    amplitudes = np.exp(1j * (k * grid.x - omega * t)) / math.sqrt(grid.length)
    return WaveFunction(grid, amplitudes, t, normalized=True)
