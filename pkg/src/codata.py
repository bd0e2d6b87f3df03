"""Pinned CODATA 2018 recommended values used by the SI unit system.

Keys are constant names, values are ``(value, unit, standard uncertainty)``
tuples. Exact constants of the 2019 SI carry an uncertainty of 0.0.

Derived quantities (hbar, k_e, a0) are not stored here; ``src.core`` computes
them from this table so that the defining identities hold to roundoff.
"""

from __future__ import annotations

__all__ = ["physical_constants", "value"]

physical_constants: dict[str, tuple[float, str, float]] = {
    "Planck constant": (6.62607015e-34, "J Hz^-1", 0.0),
    "speed of light in vacuum": (299792458.0, "m s^-1", 0.0),
    "elementary charge": (1.602176634e-19, "C", 0.0),
    "electron mass": (9.1093837015e-31, "kg", 0.0000000028e-31),
    "proton mass": (1.67262192369e-27, "kg", 0.00000000051e-27),
    "vacuum electric permittivity": (8.8541878128e-12, "F m^-1", 0.0000000013e-12),
    "Bohr radius": (5.29177210903e-11, "m", 0.00000000080e-11),
    "Rydberg constant": (10973731.568160, "m^-1", 0.000021),
    "electron volt": (1.602176634e-19, "J", 0.0),
}


def value(key: str) -> float:
    """Value of the named constant."""
    return physical_constants[key][0]

