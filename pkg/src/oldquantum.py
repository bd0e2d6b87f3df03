"""Pre-wave-mechanics hydrogen physics: photons, the photoelectric effect,
the Bohr orbits and the Rydberg formula.

Everything here needs SI constants (``constants("si")``); energies are in
joules, lengths in metres. Wavelengths are vacuum wavelengths.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.core import ConstantsSet
from src.errors import (
    BadQuantumNumbers,
    InputError,
    NonPositiveConstant,
    NonPositiveFrequency,
    NonPositiveQuantumNumber,
    NonPositiveRadius,
    NonPositiveWorkFunction,
)

logger = logging.getLogger("wavelab.oldquantum")

VISIBLE_RANGE_M = (380e-9, 750e-9)

SERIES_LOWER_LEVEL: dict[str, int] = {
    "lyman": 1,
    "balmer": 2,
    "paschen": 3,
    "brackett": 4,
    "pfund": 5,
}


@dataclass(frozen=True)
class BohrState:
    n: int
    r_n: float
    E_n: float
    v_n: float
    L_n: float


@dataclass(frozen=True)
class SpectralLine:
    n_upper: int
    n_lower: int
    E_gamma: float
    frequency: float
    wavelength: float

    @property
    def wavelength_nm(self) -> float:
        return self.wavelength * 1e9

    @property
    def is_visible(self) -> bool:
        low, high = VISIBLE_RANGE_M
        return low <= self.wavelength <= high


@dataclass(frozen=True)
class PhotoelectricResult:
    photon_energy: float
    work_function: float
    threshold_frequency: float
    emitted: bool
    ke_max: float | None


# ---------------------------------------------------------------------------
# Photons
# ---------------------------------------------------------------------------


def ev_to_joules(energy_ev: float, constants: ConstantsSet) -> float:
    return energy_ev * constants.require("eV")


def joules_to_ev(energy: float, constants: ConstantsSet) -> float:
    return energy / constants.require("eV")


def photon_energy(frequency: float, constants: ConstantsSet) -> float:
    """``E = h f``."""
    if not frequency > 0:
        raise NonPositiveFrequency(f"frequency must be positive, got {frequency}")
    return constants.h * frequency


def photon_energy_from_omega(omega: float, constants: ConstantsSet) -> float:
    """``E = hbar w``."""
    if not omega > 0:
        raise NonPositiveFrequency(f"angular frequency must be positive, got {omega}")
    return constants.hbar * omega


def photoelectric(
    work_function: float,
    constants: ConstantsSet,
    *,
    energy: float | None = None,
    frequency: float | None = None,
) -> PhotoelectricResult:
    """Emission happens only when the photon energy strictly exceeds the work function.

    Give exactly one of *energy* (photon energy in J) or *frequency* (Hz).
    """
    if (energy is None) == (frequency is None):
        raise InputError("give exactly one of energy or frequency")
    if not work_function > 0:
        raise NonPositiveWorkFunction(f"work function must be positive, got {work_function}")
    if frequency is not None:
        energy = photon_energy(frequency, constants)
    elif energy is not None and not energy > 0:
        raise NonPositiveConstant(f"photon energy must be positive, got {energy}")
    assert energy is not None
    emitted = energy > work_function
    return PhotoelectricResult(
        photon_energy=energy,
        work_function=work_function,
        threshold_frequency=work_function / constants.h,
        emitted=emitted,
        ke_max=energy - work_function if emitted else None,
    )


# ---------------------------------------------------------------------------
# Bohr model
# ---------------------------------------------------------------------------


def coulomb_force(q1: float, q2: float, r: float, constants: ConstantsSet) -> float:
    """``k_e q1 q2 / r^2`` (positive means repulsion)."""
    if not r > 0:
        raise NonPositiveRadius(f"separation must be positive, got {r}")
    return constants.require("k_e") * q1 * q2 / r**2


def centripetal_force(m: float, v: float, r: float) -> float:
    """``m v^2 / r``."""
    if not r > 0:
        raise NonPositiveRadius(f"orbit radius must be positive, got {r}")
    return m * v**2 / r


def _quantum_number(value: int, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise NonPositiveQuantumNumber(f"{name} must be a positive integer, got {value!r}")
    if value < 1:
        raise NonPositiveQuantumNumber(f"{name} must be a positive integer, got {value}")
    return int(value)


def bohr_state(n: int, constants: ConstantsSet) -> BohrState:
    """Orbit *n*: Coulomb attraction supplies the centripetal force and ``L = n hbar``."""
    n = _quantum_number(n, "n")
    a0 = constants.require("a0")
    k_e = constants.require("k_e")
    e = constants.require("e_charge")
    m = constants.m_e
    r_n = n**2 * a0
    v_n = n * constants.hbar / (m * r_n)
    return BohrState(
        n=n,
        r_n=r_n,
        E_n=-k_e * e**2 / (2.0 * n**2 * a0),
        v_n=v_n,
        L_n=m * v_n * r_n,
    )


# ---------------------------------------------------------------------------
# Spectral lines
# ---------------------------------------------------------------------------


def _check_pair(n_lower: int, n_upper: int) -> tuple[int, int]:
    for value in (n_lower, n_upper):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise BadQuantumNumbers(f"quantum numbers must be integers, got {value!r}")
    if not 1 <= n_lower < n_upper:
        raise BadQuantumNumbers(f"need 1 <= lower < upper, got lower={n_lower}, upper={n_upper}")
    return int(n_lower), int(n_upper)


def rydberg_wavelength(m_lower: int, n_upper: int, rydberg: float) -> float:
    """``1 / (R (1/m^2 - 1/n^2))``."""
    m, n = _check_pair(m_lower, n_upper)
    if not rydberg > 0:
        raise NonPositiveConstant(f"Rydberg constant must be positive, got {rydberg}")
    return 1.0 / (rydberg * (1.0 / m**2 - 1.0 / n**2))


def derived_rydberg_constant(constants: ConstantsSet) -> float:
    """``R = k_e e^2 / (2 a0 h c)``, infinite nuclear mass."""
    k_e = constants.require("k_e")
    e = constants.require("e_charge")
    return k_e * e**2 / (2.0 * constants.require("a0") * constants.h * constants.require("c"))


def hydrogen_rydberg_constant(constants: ConstantsSet) -> float:
    """Reduced-mass corrected Rydberg constant ``R_inf / (1 + m_e / m_p)`` for hydrogen."""
    return constants.require("R_inf") / (1.0 + constants.m_e / constants.require("m_p"))


def transition(n_upper: int, n_lower: int, constants: ConstantsSet) -> SpectralLine:
    """Photon emitted in the jump from orbit *n_upper* down to *n_lower*.

    ``E_gamma`` is reported as the positive level gap.
    """
    n_lower, n_upper = _check_pair(n_lower, n_upper)
    gap = abs(bohr_state(n_upper, constants).E_n - bohr_state(n_lower, constants).E_n)
    frequency = gap / constants.h
    return SpectralLine(
        n_upper=n_upper,
        n_lower=n_lower,
        E_gamma=gap,
        frequency=frequency,
        wavelength=constants.require("c") / frequency,
    )


def spectral_series(name: str, max_upper: int, constants: ConstantsSet) -> list[SpectralLine]:
    """Lines of a named series from ``lower + 1`` up to *max_upper*, longest wavelength first."""
    key = name.lower()
    if key not in SERIES_LOWER_LEVEL:
        raise InputError(f"unknown series {name!r}; choose from {', '.join(SERIES_LOWER_LEVEL)}")
    lower = SERIES_LOWER_LEVEL[key]
    _check_pair(lower, max_upper)
    lines = [transition(n, lower, constants) for n in range(lower + 1, max_upper + 1)]
    logger.debug("%s series: %d lines up to n=%d", key, len(lines), max_upper)
    return lines
