"""Numerical gate that picks the time order of the free wave equation.

A traveling wave ``exp(i(kx - wt))`` obeying ``w = hbar k^2 / 2m`` is plugged
into two candidate equations

    second order in time:  d2psi/dt2 = gamma d2psi/dx2
    first order in time:   dpsi/dt   = gamma d2psi/dx2

Each candidate fixes ``gamma`` as a ratio of derivative factors. Only a
candidate whose ``gamma`` is the same for every wavenumber can be a linear
equation with constant coefficients.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.core import ConstantsSet, SpatialGrid, norm, plane_wave_box, spectral_derivative
from src.errors import InputError, InsufficientSamples, ZeroWavenumber
from src.evolve import SplitStepPropagator

logger = logging.getLogger("wavelab.derivation_gate")

Candidate = Literal["second_order_time", "first_order_time"]
CANDIDATES: tuple[Candidate, ...] = ("second_order_time", "first_order_time")
TIME_ORDER: dict[Candidate, int] = {"second_order_time": 2, "first_order_time": 1}

GATE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TrialGamma:
    candidate: Candidate
    k: float
    omega: float
    gamma: complex


@dataclass(frozen=True)
class GateReport:
    candidate: Candidate
    gamma_samples: tuple[TrialGamma, ...]
    max_pairwise_spread: float
    tolerance: float

    @property
    def k_independent(self) -> bool:
        return self.max_pairwise_spread < self.tolerance

    @property
    def verdict(self) -> str:
        return "ACCEPT" if self.k_independent else "REJECT"


def dispersion_omega(k: float, constants: ConstantsSet) -> float:
    """``w = hbar k^2 / 2m``."""
    return constants.hbar * k**2 / (2.0 * constants.mass)


def _check_candidate(candidate: str) -> Candidate:
    if candidate not in TIME_ORDER:
        raise InputError(f"candidate must be one of {CANDIDATES}, got {candidate!r}")
    return candidate  # type: ignore[return-value]


def trial_gamma(candidate: Candidate, k: float, constants: ConstantsSet) -> TrialGamma:
    """Coefficient the candidate equation needs for a traveling wave of wavenumber *k*.

    Time derivatives bring down ``(-iw)^order`` and the second space
    derivative brings down ``(ik)^2``.
    """
    candidate = _check_candidate(candidate)
    if k == 0:
        raise ZeroWavenumber("gamma is undefined at k = 0")
    omega = dispersion_omega(k, constants)
    time_factor = (-1j * omega) ** TIME_ORDER[candidate]
    space_factor = complex(-(k**2), 0.0)
    return TrialGamma(candidate=candidate, k=float(k), omega=omega, gamma=time_factor / space_factor)


def _max_spread(values: list[complex]) -> float:
    return max(abs(a - b) for a, b in itertools.combinations(values, 2))


def run_gate(
    k_samples: Iterable[float],
    constants: ConstantsSet,
    tolerance: float = GATE_TOLERANCE,
) -> tuple[GateReport, GateReport]:
    """Report on both candidates; ``gamma`` is "constant" when its spread is below *tolerance*.

    Needs at least two distinct nonzero wavenumbers. Samples sharing ``|k|``
    cannot reject the second-order candidate since its ``gamma`` depends on
    ``|k|`` only.
    """
    samples = [float(k) for k in k_samples]
    if any(k == 0 for k in samples):
        raise ZeroWavenumber("k = 0 cannot be sampled; gamma is undefined there")
    if len(set(samples)) < 2:
        raise InsufficientSamples(f"need at least 2 distinct nonzero wavenumbers, got {samples}")

    reports = []
    for candidate in CANDIDATES:
        trials = tuple(trial_gamma(candidate, k, constants) for k in samples)
        spread = _max_spread([trial.gamma for trial in trials])
        report = GateReport(candidate, trials, spread, tolerance)
        logger.debug("%s: spread %.3g -> %s", candidate, spread, report.verdict)
        reports.append(report)
    return reports[0], reports[1]


def free_evolution_residual(
    grid: SpatialGrid,
    mode_index: int,
    t: float,
    constants: ConstantsSet,
    steps: int = 1000,
    omega: float | None = None,
) -> float:
    """L2 gap between a split-step evolved box mode and its analytic phase.

    *omega* overrides the reference frequency; by default it is the
    dispersion relation, for which the gap is pure roundoff.
    """
    k = grid.dk * mode_index
    reference_omega = dispersion_omega(k, constants) if omega is None else omega
    psi0 = plane_wave_box(grid, mode_index)
    expected = plane_wave_box(grid, mode_index, t, reference_omega)
    if t == 0:
        return norm(psi0 - expected)
    propagator = SplitStepPropagator(grid, np.zeros(grid.shape), t / steps, constants)
    evolved = psi0.with_amplitudes(propagator.run(psi0.amplitudes, steps), t)
    return norm(evolved - expected)


def sampled_gamma(
    candidate: Candidate,
    grid: SpatialGrid,
    mode_index: int,
    constants: ConstantsSet,
    dt: float = 1e-4,
) -> complex:
    """Estimate ``gamma`` from sampled fields instead of closed-form factors.

    Time derivatives use central differences across ``t = -dt, 0, dt``; the
    space derivative is spectral. ``gamma`` is the least-squares ratio of the
    two sides.
    """
    candidate = _check_candidate(candidate)
    if mode_index == 0:
        raise ZeroWavenumber("gamma is undefined at k = 0")
    omega = dispersion_omega(grid.dk * mode_index, constants)
    before, now, after = (
        plane_wave_box(grid, mode_index, t, omega).amplitudes for t in (-dt, 0.0, dt)
    )
    if TIME_ORDER[candidate] == 1:
        time_derivative = (after - before) / (2.0 * dt)
    else:
        time_derivative = (after - 2.0 * now + before) / dt**2
    space_derivative = spectral_derivative(plane_wave_box(grid, mode_index), 2)
    return complex(np.vdot(space_derivative, time_derivative) / np.vdot(space_derivative, space_derivative))
