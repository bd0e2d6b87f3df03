"""Born-rule observables, the momentum operator and its eigenfunctions.

Expectation values follow the literal integral order ``sum (Q psi)_j psi_j^* dx``
on the periodic grid. Derivatives are spectral, so plane waves on the grid
are exact eigenfunctions of :func:`apply_momentum` to roundoff.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Union

import numpy as np
from numpy.typing import NDArray
from scipy import fft

from src.core import (
    ComplexArray,
    ConstantsSet,
    RealArray,
    SpatialGrid,
    WaveFunction,
    norm,
    plane_wave_box,
    require_1d,
    spectral_derivative,
    to_momentum_space,
)
from src.errors import (
    CommensurabilityError,
    GridMismatch,
    IntervalOutOfGrid,
    NonHermitianResult,
    NonPositiveWavelength,
    ReversedInterval,
    ZeroFunction,
    ZeroMomentum,
)

if TYPE_CHECKING:
    from src.evolve import Potential

logger = logging.getLogger("wavelab.observe")

Operator = Callable[[WaveFunction], WaveFunction]
PotentialLike = Union["Potential", RealArray]

NORM_WARNING_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ObservableReport:
    """Born-rule summary of one state; position and momentum refer to the x axis."""

    norm: float
    x_mean: float
    x_var: float
    p_mean: float
    p_var: float
    kinetic_energy: float
    potential_energy: float
    total_energy: float
    uncertainty_product: float

    def satisfies_uncertainty(self, hbar: float, tolerance: float = 1e-9) -> bool:
        return self.uncertainty_product >= hbar / 2.0 - tolerance


@dataclass(frozen=True, eq=False)
class MomentumEigenfunction:
    p: float
    amplitude: complex
    wavelength: float
    samples: WaveFunction


# ---------------------------------------------------------------------------
# Probabilities
# ---------------------------------------------------------------------------


def _cumulative_probability(grid: SpatialGrid, density: RealArray, x: float) -> float:
    """Integral of the periodic linear interpolant of *density* from x_min to *x*."""
    n, dx = grid.n, grid.dx
    following = np.roll(density, -1)
    segments = 0.5 * dx * (density + following)
    s = (x - grid.x_min) / dx
    i = min(max(int(math.floor(s)), 0), n - 1)
    frac = s - i
    partial = dx * (density[i] * frac + 0.5 * (following[i] - density[i]) * frac**2)
    return float(np.sum(segments[:i]) + partial)


def probability(psi: WaveFunction, a: float, b: float) -> float:
    """Probability of finding the particle in ``[a, b]`` (requires ``a <= b``)."""
    grid = require_1d(psi.grid, "probability")
    if a > b:
        raise ReversedInterval(f"interval [{a}, {b}] is reversed; pass a < b")
    slack = 1e-12 * grid.length
    if a < grid.x_min - slack or b > grid.x_max + slack:
        raise IntervalOutOfGrid(f"[{a}, {b}] leaves the grid span [{grid.x_min}, {grid.x_max}]")
    a = max(a, grid.x_min)
    b = min(b, grid.x_max)
    density = psi.density
    return _cumulative_probability(grid, density, b) - _cumulative_probability(grid, density, a)


def sample_positions(
    psi: WaveFunction,
    count: int,
    rng: np.random.Generator | None = None,
) -> RealArray:
    """Draw *count* position measurements from ``|psi|^2`` by inverse CDF.

    Each draw picks a sample point with weight ``|psi_j|^2 dx`` and is then
    spread uniformly over that sample's cell.
    """
    grid = require_1d(psi.grid, "sample_positions")
    rng = rng if rng is not None else np.random.default_rng()
    cdf = np.cumsum(psi.density * grid.dx)
    u = rng.random(count) * cdf[-1]
    index = np.minimum(np.searchsorted(cdf, u, side="right"), grid.n - 1)
    jitter = rng.uniform(-0.5 * grid.dx, 0.5 * grid.dx, size=count)
    return grid.x[index] + jitter


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def _momentum_x(psi: WaveFunction, constants: ConstantsSet) -> ComplexArray:
    """``-i hbar d/dx`` along the propagation axis, spectrally."""
    return fft.ifftn(constants.hbar * psi.grid.k * fft.fftn(psi.amplitudes))


def apply_momentum(psi: WaveFunction, constants: ConstantsSet) -> WaveFunction:
    """``-i hbar dpsi/dx``; maps ``exp(ikx)`` to ``hbar k exp(ikx)``."""
    require_1d(psi.grid, "apply_momentum")
    return psi.with_amplitudes(_momentum_x(psi, constants))


def position_operator(psi: WaveFunction) -> WaveFunction:
    return psi.with_amplitudes(psi.grid.x * psi.amplitudes)


def momentum_operator(constants: ConstantsSet) -> Operator:
    return lambda psi: psi.with_amplitudes(_momentum_x(psi, constants))


def kinetic_operator(constants: ConstantsSet) -> Operator:
    """``p^2 / 2m`` applied spectrally (full Laplacian in 2D)."""
    scale = constants.hbar**2 / (2.0 * constants.mass)

    def apply(psi: WaveFunction) -> WaveFunction:
        return psi.with_amplitudes(fft.ifftn(scale * psi.grid.k_squared * fft.fftn(psi.amplitudes)))

    return apply


def _potential_values(psi: WaveFunction, potential: PotentialLike) -> RealArray:
    values = np.asarray(getattr(potential, "values", potential), dtype=np.float64)
    if values.shape != psi.grid.shape:
        raise GridMismatch(f"potential of shape {values.shape} on grid {psi.grid.shape}")
    return values


def potential_operator(potential: PotentialLike) -> Operator:
    def apply(psi: WaveFunction) -> WaveFunction:
        return psi.with_amplitudes(_potential_values(psi, potential) * psi.amplitudes)

    return apply


def hamiltonian(potential: PotentialLike, constants: ConstantsSet) -> Operator:
    kinetic = kinetic_operator(constants)
    return lambda psi: kinetic(psi) + potential_operator(potential)(psi)


# ---------------------------------------------------------------------------
# Expectation values
# ---------------------------------------------------------------------------


def expectation(psi: WaveFunction, op: Operator) -> complex:
    """``<Q> = sum (Q psi)_j conj(psi_j) dx``, returned complex."""
    deviation = abs(norm(psi) - 1.0)
    if deviation > NORM_WARNING_TOLERANCE:
        logger.warning("Expectation on a state whose norm deviates from 1 by %.3g", deviation)
    q_psi = op(psi)
    if q_psi.grid != psi.grid:
        raise GridMismatch("operator returned a state on a different grid")
    return complex(np.sum(q_psi.amplitudes * np.conj(psi.amplitudes)) * psi.grid.cell)


def as_real(value: complex, tolerance: float = 1e-8) -> float:
    """Real part of an expectation value that must be real."""
    if abs(value.imag) > tolerance * max(1.0, abs(value.real)):
        raise NonHermitianResult(f"expectation value {value} has a non-negligible imaginary part")
    return value.real


def expectation_position(psi: WaveFunction) -> float:
    return as_real(expectation(psi, position_operator))


def expectation_momentum(psi: WaveFunction, constants: ConstantsSet) -> float:
    return as_real(expectation(psi, momentum_operator(constants)))


def kinetic_energy(psi: WaveFunction, constants: ConstantsSet) -> float:
    return as_real(expectation(psi, kinetic_operator(constants)))


def potential_energy(psi: WaveFunction, potential: PotentialLike) -> float:
    return as_real(expectation(psi, potential_operator(potential)))


def total_energy(psi: WaveFunction, potential: PotentialLike, constants: ConstantsSet) -> float:
    """``E = <p^2/2m> + <V>``."""
    return kinetic_energy(psi, constants) + potential_energy(psi, potential)


def position_variance(psi: WaveFunction) -> float:
    mean = expectation_position(psi)
    return float(np.sum((psi.grid.x - mean) ** 2 * psi.density) * psi.grid.cell)


def momentum_variance(psi: WaveFunction, constants: ConstantsSet) -> float:
    """Computed in momentum space, where it is manifestly non-negative."""
    mean = expectation_momentum(psi, constants)
    phi = to_momentum_space(psi)
    p = constants.hbar * psi.grid.k
    return float(np.sum((p - mean) ** 2 * np.abs(phi) ** 2) * psi.grid.k_cell)


def observables(
    psi: WaveFunction,
    potential: PotentialLike,
    constants: ConstantsSet,
) -> ObservableReport:
    x_var = position_variance(psi)
    p_var = momentum_variance(psi, constants)
    kinetic = kinetic_energy(psi, constants)
    potential_part = potential_energy(psi, potential)
    return ObservableReport(
        norm=norm(psi),
        x_mean=expectation_position(psi),
        x_var=x_var,
        p_mean=expectation_momentum(psi, constants),
        p_var=p_var,
        kinetic_energy=kinetic,
        potential_energy=potential_part,
        total_energy=kinetic + potential_part,
        uncertainty_product=math.sqrt(x_var * p_var),
    )


def momentum_squared_consistency(psi: WaveFunction, constants: ConstantsSet) -> float:
    """L2 gap between ``p(p psi)/2m`` and ``-hbar^2/2m psi''``."""
    require_1d(psi.grid, "momentum_squared_consistency")
    twice = apply_momentum(apply_momentum(psi, constants), constants).amplitudes
    via_momentum = twice / (2.0 * constants.mass)
    via_laplacian = -(constants.hbar**2) / (2.0 * constants.mass) * spectral_derivative(psi, 2)
    return math.sqrt(float(np.sum(np.abs(via_momentum - via_laplacian) ** 2)) * psi.grid.cell)


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------


def eigen_residual(op: Operator, f: WaveFunction, q: complex) -> float:
    """``||op(f) - q f|| / ||f||``."""
    size = norm(f)
    if size == 0.0:
        raise ZeroFunction("eigen_residual needs a nonzero function")
    return norm(op(f) - f * q) / size


def de_broglie_wavelength(p: float, constants: ConstantsSet) -> float:
    """``lambda = h / p``; the wavelength carries the sign of the momentum."""
    if p == 0:
        raise ZeroMomentum("a particle at rest has no de Broglie wavelength")
    return constants.h / p


def momentum_from_wavelength(wavelength: float, constants: ConstantsSet) -> float:
    if not (math.isfinite(wavelength) and abs(wavelength) > 0):
        raise NonPositiveWavelength(
            f"wavelength magnitude must be positive and finite, got {wavelength}"
        )
    return constants.h / wavelength


def momentum_eigenfunction(grid: SpatialGrid, p: float, constants: ConstantsSet) -> MomentumEigenfunction:
    """Box-normalized eigenfunction ``L^(-1/2) exp(i p x / hbar)``.

    Only momenta ``hbar 2 pi j / L`` with ``j`` on the grid's mode ladder are
    exact eigenvalues on a periodic grid.
    """
    grid = require_1d(grid, "momentum_eigenfunction")
    j = p / (constants.hbar * grid.dk)
    mode = int(round(j))
    if abs(j - mode) > 1e-9 * max(1.0, abs(j)):
        raise CommensurabilityError(f"p = {p} is not hbar * 2 pi j / L for an integer j")
    if not -grid.n // 2 <= mode < grid.n // 2:
        raise CommensurabilityError(f"p = {p} lies outside the grid's resolvable band")
    samples = plane_wave_box(grid, mode)
    wavelength = math.inf if p == 0 else de_broglie_wavelength(p, constants)
    return MomentumEigenfunction(
        p=p,
        amplitude=complex(1.0 / math.sqrt(grid.length)),
        wavelength=wavelength,
        samples=samples,
    )


def momentum_coefficients(
    psi: WaveFunction, constants: ConstantsSet
) -> tuple[RealArray, NDArray[np.complex128]]:
    """Expansion of *psi* in the n box momentum eigenfunctions.

    Returns ``(p_m, c_m)`` with ``psi = sum_m c_m L^(-1/2) exp(i p_m x / hbar)``.
    """
    grid = require_1d(psi.grid, "momentum_coefficients")
    coefficients = math.sqrt(2.0 * math.pi / grid.length) * to_momentum_space(psi)
    return constants.hbar * grid.k, coefficients
