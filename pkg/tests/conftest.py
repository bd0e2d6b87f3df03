"""Shared fixtures for the wavelab test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.core import ConstantsSet, SpatialGrid, constants, gaussian_packet, make_grid


FIXTURES_DIR = Path(__file__).parent / "fixtures"
CONFIG_DIR = Path(__file__).parent.parent / "config"


@pytest.fixture
def fixtures_dir() -> Path:
    """Return the path to the test fixtures directory."""
    return FIXTURES_DIR


@pytest.fixture
def config_dir() -> Path:
    """Return the path to the shipped run configs."""
    return CONFIG_DIR


@pytest.fixture
def natural() -> ConstantsSet:
    """hbar = m = 1."""
    return constants("natural")


@pytest.fixture
def si() -> ConstantsSet:
    return constants("si")


@pytest.fixture
def grid() -> SpatialGrid:
    """Desk-scale 1D grid wide enough for unit-width packets."""
    return make_grid(-20.0, 20.0, 1024)


@pytest.fixture
def packet(grid: SpatialGrid, natural: ConstantsSet):
    """Normalized Gaussian at the origin moving with p0 = 2."""
    return gaussian_packet(grid, 0.0, 2.0, 1.0, natural)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def free_config_path(fixtures_dir: Path) -> Path:
    return fixtures_dir / "free_gaussian.yaml"
