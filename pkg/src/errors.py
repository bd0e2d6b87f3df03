"""Exception hierarchy shared by every wavelab module.

Precondition failures subclass ``ValueError`` so callers that only know the
standard library can still catch them; failures during a run subclass
``RuntimeError``.
"""

from __future__ import annotations


class WaveLabError(Exception):
    """Root of all wavelab errors."""


class InputError(WaveLabError, ValueError):
    """An argument violates a documented precondition."""


# ---------------------------------------------------------------------------
# Grids and wave functions
# ---------------------------------------------------------------------------


class NonPowerOfTwo(InputError):
    pass


class DegenerateInterval(InputError):
    pass


class NonPositiveWidth(InputError):
    pass


class ModeOutOfRange(InputError):
    pass


class ZeroFunction(InputError):
    pass


class GridMismatch(InputError):
    pass


class Only1D(InputError):
    pass


# ---------------------------------------------------------------------------
# Derivation gate
# ---------------------------------------------------------------------------


class ZeroWavenumber(InputError):
    pass


class InsufficientSamples(InputError):
    pass


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------


class BadPotentialSpec(InputError):
    pass


class KindRequires2D(InputError):
    pass


class InvalidTimeStep(InputError):
    pass


class SnapshotScheduleInvalid(InputError):
    pass


class ScreenNotReached(WaveLabError, RuntimeError):
    """The transmitted packet never crossed the detector plane."""


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


class IntervalOutOfGrid(InputError):
    pass


class ReversedInterval(InputError):
    pass


class CommensurabilityError(InputError):
    pass


class ZeroMomentum(InputError):
    pass


class NonPositiveWavelength(InputError):
    pass


class NonHermitianResult(WaveLabError, RuntimeError):
    """An expectation value that must be real carries an imaginary part."""


# ---------------------------------------------------------------------------
# Old quantum theory
# ---------------------------------------------------------------------------


class NonPositiveFrequency(InputError):
    pass


class NonPositiveRadius(InputError):
    pass


class NonPositiveQuantumNumber(InputError):
    pass


class NaturalUnitsUnsupported(InputError):
    pass


class BadQuantumNumbers(InputError):
    pass


class NonPositiveWorkFunction(InputError):
    pass


class NonPositiveConstant(InputError):
    pass


# ---------------------------------------------------------------------------
# Configuration and files
# ---------------------------------------------------------------------------


class ConfigError(InputError):
    """A run configuration is invalid; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


class CorruptSnapshot(WaveLabError, RuntimeError):
    """A snapshot file is truncated, has a bad header, or is unreadable."""
