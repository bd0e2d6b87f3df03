"""Fast checks of the two-slit helpers and the shipped geometry."""

from __future__ import annotations

import dataclasses
import logging
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from src.config import PotentialSpec, ScreenSpec, load_run_config
from src.core import make_grid_2d
from src.double_slit import (
    DEFAULT_HEIGHT_FACTOR,
    DoubleSlitConfig,
    ScreenProfile,
    absorbing_mask,
    analyze_fringes,
    describe,
    double_slit_run,
    resolve_slit_potential,
)
from src.errors import ScreenNotReached
from src.evolve import build_potential


def _profile(y: np.ndarray, intensity: np.ndarray, spacing: float = 2.0) -> ScreenProfile:
    # wavelength * distance / separation == spacing
    return ScreenProfile(
        y=y,
        intensity=intensity,
        x_screen=8.0,
        wavelength=spacing,
        slit_separation=1.0,
        screen_distance=1.0,
        transmitted=0.5,
    )


class TestAbsorbingMask:
    """Cosine-ramp layer along the box edges."""

    @pytest.fixture
    def box(self):
        return make_grid_2d(-8.0, 8.0, 64, -8.0, 8.0, 64)

    def test_edge_and_interior_values(self, box):
        mask = absorbing_mask(box, width=2.0, strength=0.1)
        assert mask[0, 32] == pytest.approx(0.9)
        assert mask[32, 0] == pytest.approx(0.9)
        assert np.all(mask[16:48, 16:48] == 1.0)
        assert mask.min() >= 0.9

    def test_ramp_is_continuous_at_inner_edge(self, box):
        mask = absorbing_mask(box, width=2.0, strength=0.1)
        row = mask[:, 32]
        assert np.max(np.abs(np.diff(row))) < 0.1 * box.x_axis.dx, "ramp must rise smoothly"

    def test_mirror_symmetric(self, box):
        mask = absorbing_mask(box, width=2.0, strength=0.1)
        n = box.y_axis.n
        mirrored = mask[:, (n - np.arange(n)) % n]
        assert np.array_equal(mask, mirrored)

    def test_zero_width_is_transparent(self, box):
        assert np.all(absorbing_mask(box, width=0.0, strength=0.1) == 1.0)


class TestResolveSlitPotential:
    def test_default_height_scales_with_kinetic_energy(self, natural):
        spec = PotentialSpec(
            type="double_slit", barrier_thickness=0.5, slit_separation=4.0, slit_width=1.0
        )
        resolved = resolve_slit_potential(spec, 12.0, natural)
        assert resolved.barrier_height == pytest.approx(DEFAULT_HEIGHT_FACTOR * 72.0)

    def test_explicit_height_is_kept(self, natural):
        spec = PotentialSpec(
            type="double_slit",
            barrier_height=360.0,
            barrier_thickness=0.5,
            slit_separation=4.0,
            slit_width=1.0,
        )
        assert resolve_slit_potential(spec, 12.0, natural) is spec


class TestAnalyzeFringes:
    """Peak finding on synthetic screen profiles."""

    def test_cosine_fringes(self):
        y = np.linspace(-16.0, 16.0, 512, endpoint=False)
        intensity = np.cos(np.pi * y / 2.0) ** 2 * np.exp(-(y**2) / 200.0)
        analysis = analyze_fringes(_profile(y, intensity))
        assert analysis.central == pytest.approx(0.0, abs=1e-9)
        assert analysis.spacing == pytest.approx(2.0, rel=1e-2)
        assert analysis.relative_error < 1e-2
        assert len(analysis.maxima) >= 5

    def test_off_axis_lobe(self):
        y = np.linspace(-16.0, 16.0, 512, endpoint=False)
        analysis = analyze_fringes(_profile(y, np.exp(-((y - 2.0) ** 2) / 8.0)))
        assert analysis.maxima == pytest.approx((2.0,), abs=1e-6)
        assert analysis.spacing is None
        assert analysis.relative_error is None

    def test_dark_screen(self):
        y = np.linspace(-4.0, 4.0, 64, endpoint=False)
        analysis = analyze_fringes(_profile(y, np.zeros_like(y)))
        assert analysis.maxima == ()
        assert describe(analysis)["count"] == 0


class TestShippedGeometry:
    """The shipped two-slit config resolves the beam and sits in the far field."""

    @pytest.fixture
    def config(self, config_dir: Path):
        return load_run_config(config_dir / "double_slit.yaml")

    def test_wavelength_resolved(self, config):
        wavelength = 2.0 * math.pi / config.initial.p0
        grid = config.grid.build()
        assert wavelength / grid.x_axis.dx >= 8.0
        assert wavelength / grid.y_axis.dx >= 8.0

    def test_barrier_phase_per_step(self, config):
        assert config.potential.barrier_height * config.time.dt < 0.5

    def test_barrier_is_opaque(self, config):
        energy = config.initial.p0**2 / 2.0
        kappa = math.sqrt(2.0 * (config.potential.barrier_height - energy))
        assert kappa * config.potential.barrier_thickness > 10.0

    def test_first_fringe_matches_far_field(self, config):
        """Two point sources put the first maximum where the path difference is one wavelength."""
        wavelength = 2.0 * math.pi / config.initial.p0
        distance = config.screen.x - config.potential.barrier_x
        d = config.potential.slit_separation

        def path_difference(y: float) -> float:
            return math.hypot(distance, y + d / 2.0) - math.hypot(distance, y - d / 2.0) - wavelength

        first = brentq(path_difference, 0.0, distance)
        far_field = wavelength * distance / d
        assert abs(first - far_field) / far_field < 0.025

    def test_single_slit_in_far_field(self, config):
        wavelength = 2.0 * math.pi / config.initial.p0
        distance = config.screen.x - config.potential.barrier_x
        assert config.potential.slit_width**2 / (wavelength * distance) < 0.2

    def test_pattern_fits_inside_absorber(self, config):
        wavelength = 2.0 * math.pi / config.initial.p0
        distance = config.screen.x - config.potential.barrier_x
        d = config.potential.slit_separation
        third_order = distance * math.tan(math.asin(3.0 * wavelength / d))
        assert third_order < config.grid.ymax - config.screen.absorbing_width


def test_coarse_step_warns_about_leaky_barrier(config_dir: Path, caplog):
    config = load_run_config(config_dir / "double_slit.yaml")
    sim = config.to_sim_config()
    coarse = DoubleSlitConfig(
        sim=dataclasses.replace(sim, dt=0.01, steps=1),
        screen=ScreenSpec(x=8.0, threshold=1e-3),
    )
    with caplog.at_level(logging.WARNING, logger="wavelab.double_slit"):
        with pytest.raises(ScreenNotReached):
            double_slit_run(coarse)
    assert any("Barrier phase" in record.getMessage() for record in caplog.records)


def test_potential_has_two_openings(config_dir: Path, natural):
    config = load_run_config(config_dir / "double_slit.yaml")
    grid = config.grid.build()
    values = build_potential(config.potential, grid, natural).values
    column = int(np.argmin(np.abs(grid.x_axis.x - config.potential.barrier_x)))
    open_rows = grid.y_axis.x[values[column, :] == 0.0]
    assert np.all(np.abs(np.abs(open_rows) - 2.0) < 0.5)
    assert open_rows.min() < 0 < open_rows.max()
