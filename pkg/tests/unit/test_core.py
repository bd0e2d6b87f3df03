"""Tests for grids, constants, wave functions and transforms."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from src import codata
from src.core import (
    WaveFunction,
    constants,
    from_momentum_space,
    gaussian_packet,
    gaussian_packet_2d,
    inner_product,
    make_grid,
    make_grid_2d,
    norm,
    normalize,
    plane_wave_box,
    require_1d,
    spectral_derivative,
    to_momentum_space,
)
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


class TestConstants:
    """Unit systems and particle overrides."""

    def test_natural_units(self):
        table = constants("natural")
        assert table.hbar == 1.0
        assert table.mass == 1.0
        assert table.h == pytest.approx(2.0 * math.pi, rel=1e-15)

    def test_si_hbar_is_h_over_two_pi(self):
        table = constants("si")
        assert table.hbar * 2.0 * math.pi == pytest.approx(table.h, rel=1e-15)

    def test_si_bohr_radius_matches_codata(self):
        """a0 is derived from h, m_e, e and eps0, and must agree with the tabulated value."""
        table = constants("si")
        assert table.require("a0") == pytest.approx(codata.value("Bohr radius"), rel=1e-8)

    def test_natural_units_refuse_electromagnetic_constants(self):
        with pytest.raises(NaturalUnitsUnsupported, match="k_e"):
            constants("natural").require("k_e")

    def test_particle_overrides(self):
        table = constants("natural", mass=2.0, hbar=0.5)
        assert table.mass == 2.0
        assert table.hbar == 0.5
        assert table.h == pytest.approx(math.pi)

    def test_rejects_unknown_unit_system(self):
        with pytest.raises(InputError):
            constants("cgs")  # type: ignore[arg-type]

    def test_rejects_non_positive_mass(self):
        with pytest.raises(NonPositiveConstant):
            constants("natural", mass=0.0)


class TestGrid:
    """Periodic sample grids."""

    def test_spacing_and_samples(self):
        grid = make_grid(-10.0, 10.0, 256)
        assert grid.dx == pytest.approx(20.0 / 256)
        assert grid.dk == pytest.approx(2.0 * math.pi / 20.0)
        assert grid.x[0] == -10.0
        assert grid.x[-1] == pytest.approx(10.0 - grid.dx), "x_max is not a sample"

    def test_mode_ladder_order(self):
        grid = make_grid(0.0, 1.0, 8)
        assert list(grid.mode_indices) == [0, 1, 2, 3, -4, -3, -2, -1]

    @pytest.mark.parametrize("n", [0, 4, 100, 1000])
    def test_rejects_non_power_of_two(self, n: int):
        with pytest.raises(NonPowerOfTwo):
            make_grid(0.0, 1.0, n)

    def test_rejects_float_sample_count(self):
        with pytest.raises(NonPowerOfTwo):
            make_grid(0.0, 1.0, 64.0)  # type: ignore[arg-type]

    @pytest.mark.parametrize("bounds", [(1.0, 1.0), (2.0, -2.0), (0.0, math.inf)])
    def test_rejects_degenerate_interval(self, bounds: tuple[float, float]):
        with pytest.raises(DegenerateInterval):
            make_grid(bounds[0], bounds[1], 64)

    def test_arrays_are_read_only(self):
        grid = make_grid(0.0, 1.0, 16)
        with pytest.raises(ValueError):
            grid.x[0] = 5.0

    def test_two_dimensional_grid(self):
        grid = make_grid_2d(-4.0, 4.0, 32, -2.0, 2.0, 16)
        assert grid.shape == (32, 16)
        assert grid.cell == pytest.approx(0.25 * 0.25)
        assert grid.x[3, 0] == grid.x[3, 7], "x varies along the first axis only"
        with pytest.raises(Only1D):
            require_1d(grid, "test")


class TestWaveFunction:
    """Construction, arithmetic and normalization."""

    def test_shape_must_match_grid(self, grid):
        with pytest.raises(GridMismatch):
            WaveFunction(grid, np.zeros(grid.n + 1))

    def test_normalized_flag_is_checked(self, grid):
        with pytest.raises(InputError):
            WaveFunction(grid, np.ones(grid.n), normalized=True)

    def test_amplitudes_are_immutable(self, packet):
        with pytest.raises(ValueError):
            packet.amplitudes[0] = 1.0

    def test_normalize_zero_function(self, grid):
        with pytest.raises(ZeroFunction):
            normalize(WaveFunction(grid, np.zeros(grid.n)))

    def test_superposition_arithmetic(self, grid, packet):
        wave = plane_wave_box(grid, 3)
        combined = 2.0 * packet + wave * 1j
        assert np.allclose(combined.amplitudes, 2.0 * packet.amplitudes + 1j * wave.amplitudes)

    def test_grid_mismatch_in_arithmetic(self, packet):
        other = plane_wave_box(make_grid(-20.0, 20.0, 512), 1)
        with pytest.raises(GridMismatch):
            packet + other

    def test_inner_product_is_conjugate_linear_in_first_slot(self, grid, packet):
        wave = plane_wave_box(grid, 2)
        assert inner_product(packet * 1j, wave) == pytest.approx(-1j * inner_product(packet, wave))
        assert inner_product(packet, packet) == pytest.approx(1.0, abs=1e-12)

    def test_normalize_is_idempotent(self, grid, rng):
        psi = normalize(WaveFunction(grid, rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)))
        again = normalize(psi)
        scale = np.max(np.abs(psi.amplitudes))
        assert np.max(np.abs(again.amplitudes - psi.amplitudes)) < 1e-13 * scale
        assert norm(again) == pytest.approx(1.0, abs=1e-13)


class TestInitialStates:
    """Gaussian packets and box plane waves."""

    def test_gaussian_is_normalized(self, packet):
        assert norm(packet) == pytest.approx(1.0, abs=1e-10)
        assert packet.normalized

    def test_gaussian_rejects_zero_width(self, grid, natural):
        with pytest.raises(NonPositiveWidth):
            gaussian_packet(grid, 0.0, 0.0, 0.0, natural)

    def test_gaussian_warns_when_clipped(self, natural, caplog):
        small = make_grid(-3.0, 3.0, 128)
        with caplog.at_level(logging.WARNING, logger="wavelab.core"):
            gaussian_packet(small, 0.0, 0.0, 1.0, natural)
        assert "box edge" in caplog.text

    def test_plane_wave_is_box_normalized(self, grid):
        wave = plane_wave_box(grid, 5)
        assert np.allclose(np.abs(wave.amplitudes), 1.0 / math.sqrt(grid.length))
        assert norm(wave) == pytest.approx(1.0, abs=1e-12)

    def test_plane_waves_are_orthonormal(self):
        grid = make_grid(-10.0, 10.0, 64)
        for j in range(-8, 8):
            for m in range(-8, 8):
                overlap = inner_product(plane_wave_box(grid, j), plane_wave_box(grid, m))
                expected = 1.0 if j == m else 0.0
                assert abs(overlap - expected) < 1e-12, f"modes {j} and {m}"

    def test_plane_wave_mode_range(self, grid):
        plane_wave_box(grid, -grid.n // 2)
        with pytest.raises(ModeOutOfRange):
            plane_wave_box(grid, grid.n // 2)
        with pytest.raises(ModeOutOfRange):
            plane_wave_box(grid, 1.5)  # type: ignore[arg-type]

    def test_gaussian_2d_is_normalized(self, natural):
        grid = make_grid_2d(-8.0, 8.0, 64, -8.0, 8.0, 64)
        psi = gaussian_packet_2d(grid, 0.0, 0.0, 1.0, 0.0, 1.0, 1.5, natural)
        assert norm(psi) == pytest.approx(1.0, abs=1e-10)


class TestTransforms:
    """Momentum-space amplitudes and spectral derivatives."""

    def test_parseval(self, packet):
        phi = to_momentum_space(packet)
        in_k = float(np.sum(np.abs(phi) ** 2)) * packet.grid.dk
        assert in_k == pytest.approx(1.0, abs=1e-12)

    def test_parseval_2d(self, natural):
        grid = make_grid_2d(-8.0, 8.0, 64, -8.0, 8.0, 32)
        psi = gaussian_packet_2d(grid, 0.5, -0.5, 2.0, 1.0, 1.0, 1.2, natural)
        phi = to_momentum_space(psi)
        assert float(np.sum(np.abs(phi) ** 2)) * grid.k_cell == pytest.approx(1.0, abs=1e-12)

    def test_round_trip(self, packet):
        back = from_momentum_space(packet.grid, to_momentum_space(packet))
        assert np.max(np.abs(back.amplitudes - packet.amplitudes)) < 1e-12

    def test_gaussian_transform_matches_analytic(self, grid, natural):
        """A centred Gaussian of width sigma maps to (2 sigma^2/pi)^(1/4) exp(-sigma^2 k^2)."""
        sigma = 1.0
        psi = gaussian_packet(grid, 0.0, 0.0, sigma, natural)
        expected = (2.0 * sigma**2 / math.pi) ** 0.25 * np.exp(-(sigma**2) * grid.k**2)
        assert np.max(np.abs(to_momentum_space(psi) - expected)) < 1e-10

    def test_spectral_derivative_of_plane_wave(self, grid):
        wave = plane_wave_box(grid, 7)
        k = 7 * grid.dk
        assert np.max(np.abs(spectral_derivative(wave) - 1j * k * wave.amplitudes)) < 1e-12
        second = spectral_derivative(wave, 2)
        assert np.max(np.abs(second + k**2 * wave.amplitudes)) < 1e-11
