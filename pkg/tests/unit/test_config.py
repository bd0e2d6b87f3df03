"""Tests for loading and validating run configurations."""

from __future__ import annotations

from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from src.config import RunConfig, load_run_config, parse_run_config
from src.core import SpatialGrid, SpatialGrid2D
from src.errors import ConfigError, InputError


def _minimal(**sections) -> dict:
    raw = {
        "grid": {"xmin": -10.0, "xmax": 10.0, "n": 128},
        "time": {"dt": 0.01, "steps": 10},
        "initial": {"type": "gaussian"},
    }
    raw.update(sections)
    return raw


class TestLoadRunConfig:
    """YAML files on disk."""

    def test_loads_fixture(self, free_config_path: Path):
        config = load_run_config(free_config_path)
        assert config.grid.n == 256
        assert config.time.snapshot_every == 10
        assert config.initial.p0 == 3.0
        assert config.potential.type == "free"
        assert config.units.system == "natural", "units default to natural"
        assert config.time.scheme == "split_step"

    @pytest.mark.parametrize("name", ["default.yaml", "harmonic.yaml", "double_slit.yaml"])
    def test_shipped_configs_are_valid(self, config_dir: Path, name: str):
        config = load_run_config(config_dir / name)
        assert isinstance(config, RunConfig)

    def test_double_slit_config_is_2d(self, config_dir: Path):
        config = load_run_config(config_dir / "double_slit.yaml")
        assert config.grid.is_2d
        assert isinstance(config.grid.build(), SpatialGrid2D)
        assert config.screen is not None

    def test_missing_key_is_named(self, fixtures_dir: Path):
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(fixtures_dir / "missing_dt.yaml")
        assert exc_info.value.key == "time.dt"
        assert str(exc_info.value).startswith("time.dt:")

    def test_unknown_key_is_rejected(self, fixtures_dir: Path):
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(fixtures_dir / "unknown_key.yaml")
        assert exc_info.value.key == "grid.spacing"

    def test_broken_yaml(self, fixtures_dir: Path):
        with pytest.raises(ConfigError, match="not valid YAML") as exc_info:
            load_run_config(fixtures_dir / "broken.yaml")
        assert exc_info.value.key == "config"

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(tmp_path / "absent.yaml")

    def test_config_error_is_an_input_error(self, fixtures_dir: Path):
        with pytest.raises(InputError):
            load_run_config(fixtures_dir / "missing_dt.yaml")


class TestValidation:
    """Field and cross-field rules."""

    @pytest.mark.parametrize(
        "section,key",
        [
            ("grid", "xmin"),
            ("grid", "xmax"),
            ("grid", "n"),
            ("time", "dt"),
            ("time", "steps"),
            ("initial", "type"),
        ],
    )
    def test_every_required_key_is_named(self, free_config_path: Path, section: str, key: str):
        """Deleting any single required key fails with that key in the message."""
        raw = yaml.safe_load(free_config_path.read_text(encoding="utf-8"))
        del raw[section][key]
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(raw)
        assert exc_info.value.key == f"{section}.{key}"

    @pytest.mark.parametrize("section", ["grid", "time", "initial"])
    def test_missing_section_is_named(self, free_config_path: Path, section: str):
        raw = yaml.safe_load(free_config_path.read_text(encoding="utf-8"))
        del raw[section]
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(raw)
        assert exc_info.value.key == section

    def test_top_level_must_be_mapping(self):
        with pytest.raises(ConfigError):
            parse_run_config(["grid", "time"])

    @pytest.mark.parametrize("n", [4, 100, 1000])
    def test_grid_size_power_of_two(self, n: int):
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(_minimal(grid={"xmin": -1.0, "xmax": 1.0, "n": n}))
        assert exc_info.value.key == "grid.n"

    def test_reversed_extent(self):
        with pytest.raises(ConfigError, match="xmax must exceed") as exc_info:
            parse_run_config(_minimal(grid={"xmin": 1.0, "xmax": -1.0, "n": 64}))
        assert exc_info.value.key == "grid.xmax"
        assert str(exc_info.value).startswith("grid.xmax:")

    def test_partial_y_axis(self):
        with pytest.raises(ConfigError, match="together") as exc_info:
            parse_run_config(_minimal(grid={"xmin": -1.0, "xmax": 1.0, "n": 64, "ny": 64}))
        assert exc_info.value.key == "grid.ymin", "first missing y key is named"

    def test_reversed_y_extent(self):
        grid = {"xmin": -1.0, "xmax": 1.0, "n": 64, "ymin": 2.0, "ymax": 1.0, "ny": 64}
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(_minimal(grid=grid))
        assert exc_info.value.key == "grid.ymax"

    def test_non_positive_step(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(_minimal(time={"dt": 0.0, "steps": 10}))
        assert exc_info.value.key == "time.dt"

    def test_snapshot_cadence_must_divide_steps(self):
        with pytest.raises(ConfigError, match="must divide") as exc_info:
            parse_run_config(_minimal(time={"dt": 0.01, "steps": 10, "snapshot_every": 3}))
        assert exc_info.value.key == "time.snapshot_every"

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(_minimal(time={"dt": 0.01, "steps": 10, "scheme": "euler"}))
        assert exc_info.value.key == "time.scheme"

    def test_unknown_potential_type(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_run_config(_minimal(potential={"type": "morse"}))
        assert exc_info.value.key == "potential.type"

    def test_sections_are_frozen(self):
        config = parse_run_config(_minimal())
        with pytest.raises(ValidationError):
            config.time.dt = 1.0  # type: ignore[misc]


class TestBuild:
    """Turning a validated config into run objects."""

    def test_particle_overrides_reach_constants(self):
        config = parse_run_config(_minimal(particle={"mass": 2.0, "hbar": 0.5}))
        table = config.build_constants()
        assert table.mass == 2.0
        assert table.hbar == 0.5

    def test_si_units(self):
        config = parse_run_config(_minimal(units={"system": "si"}))
        assert config.build_constants().unit_system == "si"

    def test_to_sim_config(self, free_config_path: Path):
        sim = load_run_config(free_config_path).to_sim_config()
        assert isinstance(sim.grid, SpatialGrid)
        assert sim.grid.n == 256
        assert sim.dt == 0.01
        assert sim.steps == 20
        assert sim.snapshot_every == 10
        assert sim.initial.p0 == 3.0

    def test_echo_round_trip(self, config_dir: Path):
        config = load_run_config(config_dir / "double_slit.yaml")
        echoed = config.echo()
        again = parse_run_config(yaml.safe_load(yaml.safe_dump(echoed)))
        assert again == config

    def test_echo_drops_unset_optionals(self):
        echoed = parse_run_config(_minimal()).echo()
        assert "screen" not in echoed
        assert "ymin" not in echoed["grid"]
