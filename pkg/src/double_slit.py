"""Two-slit scenario: a 2D Gaussian beam through a barrier with two gaps.

The screen intensity is ``|psi(x_screen, y)|^2`` integrated over time. An
optional cosine-ramp absorbing layer along the box edges keeps reflected
and diffracted waves from wrapping around the periodic box.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from src.config import PotentialSpec, ScreenSpec
from src.core import ConstantsSet, RealArray, SpatialGrid, SpatialGrid2D
from src.errors import BadPotentialSpec, InputError, KindRequires2D, ScreenNotReached
from src.evolve import SimConfig, SplitStepPropagator, build_initial_state, build_potential, check_schedule
from src.observe import de_broglie_wavelength

logger = logging.getLogger("wavelab.double_slit")

DEFAULT_HEIGHT_FACTOR = 50.0
PROGRESS_EVERY = 500
MAX_BARRIER_PHASE = 1.0


@dataclass(frozen=True)
class DoubleSlitConfig:
    sim: SimConfig
    screen: ScreenSpec


@dataclass(frozen=True, eq=False)
class ScreenProfile:
    """Time-integrated screen intensity versus the transverse coordinate."""

    y: RealArray
    intensity: RealArray
    x_screen: float
    wavelength: float
    slit_separation: float
    screen_distance: float
    transmitted: float

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def fraunhofer_spacing(self) -> float:
        """Far-field fringe spacing ``lambda D / d``."""
        return self.wavelength * self.screen_distance / self.slit_separation


@dataclass(frozen=True)
class FringeAnalysis:
    maxima: tuple[float, ...]
    central: float | None
    spacing: float | None
    predicted_spacing: float

    @property
    def relative_error(self) -> float | None:
        if self.spacing is None:
            return None
        return abs(self.spacing - self.predicted_spacing) / self.predicted_spacing


def _edge_distance(axis: SpatialGrid) -> RealArray:
    return np.minimum(axis.x - axis.x_min, axis.x_max - axis.x)


def absorbing_mask(grid: SpatialGrid2D, width: float, strength: float) -> RealArray:
    """``1 - strength cos^2(pi s / 2W)`` within *width* of any edge, 1 elsewhere.

    ``s`` is the distance to the nearest edge, so the mask rises smoothly
    from ``1 - strength`` at the edge to 1 at depth *width*.
    """
    if not width > 0:
        return np.ones(grid.shape)
    sx, sy = np.meshgrid(_edge_distance(grid.x_axis), _edge_distance(grid.y_axis), indexing="ij")
    s = np.minimum(sx, sy)
    ramp = 1.0 - strength * np.cos(np.pi * s / (2.0 * width)) ** 2
    return np.where(s < width, ramp, 1.0)


def resolve_slit_potential(spec: PotentialSpec, p0: float, constants: ConstantsSet) -> PotentialSpec:
    """Fill in the default barrier height, a multiple of the beam kinetic energy."""
    if spec.barrier_height is not None:
        return spec
    height = DEFAULT_HEIGHT_FACTOR * p0**2 / (2.0 * constants.mass)
    return spec.model_copy(update={"barrier_height": height})


def double_slit_run(config: DoubleSlitConfig) -> ScreenProfile:
    """Send the beam through the slits and accumulate the screen intensity."""
    sim, screen = config.sim, config.screen
    grid = sim.grid
    if not isinstance(grid, SpatialGrid2D):
        raise KindRequires2D("the two-slit run needs a 2D grid")
    if sim.potential.type != "double_slit":
        raise BadPotentialSpec(f"the two-slit run needs potential.type 'double_slit', got '{sim.potential.type}'")
    if sim.initial.type != "gaussian" or not sim.initial.p0 > 0:
        raise InputError("initial must be a gaussian beam with forward momentum p0 > 0")
    if not sim.potential.barrier_x < screen.x < grid.x_axis.x_max:
        raise InputError(f"screen.x = {screen.x} must lie between the barrier and the box edge")
    check_schedule(sim)

    constants = sim.constants
    spec = resolve_slit_potential(sim.potential, sim.initial.p0, constants)
    potential = build_potential(spec, grid, constants)
    barrier_phase = float(spec.barrier_height or 0.0) * sim.dt / constants.hbar
    if barrier_phase > MAX_BARRIER_PHASE:
        logger.warning(
            "Barrier phase per step is %.3g rad; the wall leaks unless dt or barrier_height shrink",
            barrier_phase,
        )
    psi0 = build_initial_state(sim.initial, grid, constants)
    absorber = (
        absorbing_mask(grid, screen.absorbing_width, screen.absorbing_strength)
        if screen.absorbing_width > 0
        else None
    )
    propagator = SplitStepPropagator(grid, potential.values, sim.dt, constants, absorber=absorber)

    x_axis = grid.x_axis.x
    column = int(np.argmin(np.abs(x_axis - screen.x)))
    beyond = x_axis > screen.x
    intensity = np.zeros(grid.y_axis.n)
    transmitted = 0.0
    logger.info(
        "Two-slit run: %d steps of dt=%g, screen at x=%g (column %d), closed slit: %s",
        sim.steps,
        sim.dt,
        screen.x,
        column,
        spec.closed_slit,
    )

    amplitudes = psi0.amplitudes
    for step in range(1, sim.steps + 1):
        amplitudes = propagator.step(amplitudes)
        intensity += np.abs(amplitudes[column, :]) ** 2 * sim.dt
        past_screen = float(np.sum(np.abs(amplitudes[beyond, :]) ** 2) * grid.cell)
        transmitted = max(transmitted, past_screen)
        if step % PROGRESS_EVERY == 0:
            logger.debug("step %d: probability past the screen %.4g", step, past_screen)

    if transmitted < screen.threshold:
        raise ScreenNotReached(
            f"at most {transmitted:.3g} of the probability crossed x = {screen.x} "
            f"(threshold {screen.threshold}); run longer or move the screen"
        )

    return ScreenProfile(
        y=grid.y_axis.x.copy(),
        intensity=intensity,
        x_screen=float(x_axis[column]),
        wavelength=de_broglie_wavelength(sim.initial.p0, constants),
        slit_separation=float(spec.slit_separation or 0.0),
        screen_distance=float(x_axis[column]) - spec.barrier_x,
        transmitted=transmitted,
    )


def _refine(intensity: RealArray, index: int) -> float:
    """Sub-sample offset of a peak from the parabola through its neighbours."""
    if index == 0 or index == len(intensity) - 1:
        return 0.0
    left, middle, right = intensity[index - 1], intensity[index], intensity[index + 1]
    curvature = left - 2.0 * middle + right
    if curvature == 0:
        return 0.0
    return 0.5 * (left - right) / curvature


def analyze_fringes(profile: ScreenProfile, prominence: float = 0.1) -> FringeAnalysis:
    """Locate intensity maxima and estimate the fringe spacing.

    Peaks must stand out by *prominence* times the largest intensity. The
    central maximum is the strongest peak, and the spacing is the mean gap
    to its immediate neighbours.
    """
    intensity = profile.intensity
    peak_height = float(np.max(intensity))
    if peak_height <= 0:
        logger.warning("Screen intensity is zero everywhere")
        return FringeAnalysis((), None, None, profile.fraunhofer_spacing)

    peaks, _ = find_peaks(intensity, prominence=prominence * peak_height)
    maxima = tuple(
        float(profile.y[i] + _refine(intensity, int(i)) * profile.dy) for i in peaks
    )
    if not maxima:
        return FringeAnalysis((), None, None, profile.fraunhofer_spacing)

    strongest = int(np.argmax(intensity[peaks]))
    central = maxima[strongest]
    gaps = [
        abs(maxima[j] - central) for j in (strongest - 1, strongest + 1) if 0 <= j < len(maxima)
    ]
    spacing = float(np.mean(gaps)) if gaps else None
    logger.info(
        "Found %d maxima, central at y=%.4g, spacing %s (far field %.4g)",
        len(maxima),
        central,
        "n/a" if spacing is None else f"{spacing:.4g}",
        profile.fraunhofer_spacing,
    )
    return FringeAnalysis(maxima, central, spacing, profile.fraunhofer_spacing)


def describe(analysis: FringeAnalysis) -> dict[str, object]:
    """Plain-data summary for the fringe file."""
    return {
        "maxima": list(analysis.maxima),
        "count": len(analysis.maxima),
        "central": analysis.central,
        "spacing": analysis.spacing,
        "predicted_spacing": analysis.predicted_spacing,
        "relative_error": analysis.relative_error,
    }
