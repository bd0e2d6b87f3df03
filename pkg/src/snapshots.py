"""Result files: wave-function snapshots, observable series, screen profiles
and the run manifest.

Binary snapshot layout (little-endian)::

    magic     4 bytes   b"WVLB"
    version   u16       FORMAT_VERSION
    ndim      u16       1 or 2
    per axis  u32 n, f64 x_min, f64 x_max
    t         f64
    payload   complex128 samples (interleaved re/im f64), C order

CSV numbers are written with 17 significant digits, which round-trips
64-bit floats exactly.
"""

from __future__ import annotations

import logging
import os
import platform
import re
import struct
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal

import numpy as np
import scipy
import yaml

from src import __version__
from src.core import Grid, SpatialGrid, WaveFunction, make_grid, make_grid_2d
from src.errors import CorruptSnapshot, InputError

logger = logging.getLogger("wavelab.snapshots")

SnapshotFormat = Literal["csv", "binary"]

MAGIC = b"WVLB"
FORMAT_VERSION = 1
BINARY_SUFFIX = ".wvlb"
CSV_FLOAT = "%.17g"

_HEADER = struct.Struct("<4sHH")
_AXIS = struct.Struct("<Idd")
_TIME = struct.Struct("<d")
_PAYLOAD_DTYPE = np.dtype("<c16")

_META_PREFIX = "# wavelab snapshot"
_META_FIELD = re.compile(r"(\w+)=(\S+)")


def _axes(grid: Grid) -> tuple[SpatialGrid, ...]:
    return (grid,) if isinstance(grid, SpatialGrid) else (grid.x_axis, grid.y_axis)


def _grid_from_axes(axes: list[tuple[int, float, float]]) -> Grid:
    if len(axes) == 1:
        n, x_min, x_max = axes[0]
        return make_grid(x_min, x_max, n)
    (nx, x_min, x_max), (ny, y_min, y_max) = axes
    return make_grid_2d(x_min, x_max, nx, y_min, y_max, ny)


# ---------------------------------------------------------------------------
# Binary snapshots
# ---------------------------------------------------------------------------


def encode_snapshot(psi: WaveFunction) -> bytes:
    axes = _axes(psi.grid)
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, len(axes))]
    parts.extend(_AXIS.pack(axis.n, axis.x_min, axis.x_max) for axis in axes)
    parts.append(_TIME.pack(psi.t))
    parts.append(np.ascontiguousarray(psi.amplitudes, dtype=_PAYLOAD_DTYPE).tobytes())
    return b"".join(parts)


def decode_snapshot(data: bytes) -> WaveFunction:
    """Inverse of :func:`encode_snapshot`; raises CorruptSnapshot on any damage."""
    try:
        magic, version, ndim = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise CorruptSnapshot(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise CorruptSnapshot(f"unsupported snapshot version {version}")
        if ndim not in (1, 2):
            raise CorruptSnapshot(f"unsupported dimension count {ndim}")
        offset = _HEADER.size
        axes = []
        for _ in range(ndim):
            axes.append(_AXIS.unpack_from(data, offset))
            offset += _AXIS.size
        (t,) = _TIME.unpack_from(data, offset)
        offset += _TIME.size
    except struct.error as exc:
        raise CorruptSnapshot(f"truncated snapshot header: {exc}") from exc

    try:
        grid = _grid_from_axes(axes)
    except InputError as exc:
        raise CorruptSnapshot(f"snapshot header describes an invalid grid: {exc}") from exc
    expected = int(np.prod(grid.shape)) * _PAYLOAD_DTYPE.itemsize
    payload = data[offset:]
    if len(payload) != expected:
        raise CorruptSnapshot(f"payload has {len(payload)} bytes, expected {expected}")
    amplitudes = np.frombuffer(payload, dtype=_PAYLOAD_DTYPE).reshape(grid.shape)
    return WaveFunction(grid, amplitudes.astype(np.complex128), t)


def write_snapshot_binary(psi: WaveFunction, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(encode_snapshot(psi))
    return target


def read_snapshot_binary(path: str | Path) -> WaveFunction:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CorruptSnapshot(f"cannot read snapshot {path}: {exc}") from exc
    return decode_snapshot(data)


# ---------------------------------------------------------------------------
# CSV snapshots
# ---------------------------------------------------------------------------


def _metadata_line(psi: WaveFunction) -> str:
    fields = [f"t={psi.t!r}"]
    names = (("x_min", "x_max", "n"), ("y_min", "y_max", "ny"))
    for axis, (lo, hi, count) in zip(_axes(psi.grid), names):
        fields.extend((f"{lo}={axis.x_min!r}", f"{hi}={axis.x_max!r}", f"{count}={axis.n}"))
    return f"{_META_PREFIX} {' '.join(fields)}"


def write_snapshot_csv(psi: WaveFunction, path: str | Path) -> Path:
    """Columns ``x[,y],re_psi,im_psi,prob_density`` after a metadata comment line."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    grid = psi.grid
    amplitudes = psi.amplitudes.ravel()
    coordinates = [grid.x.ravel()] if isinstance(grid, SpatialGrid) else [grid.x.ravel(), grid.y.ravel()]
    names = ["x"] if isinstance(grid, SpatialGrid) else ["x", "y"]
    table = np.column_stack([*coordinates, amplitudes.real, amplitudes.imag, np.abs(amplitudes) ** 2])
    header = _metadata_line(psi) + "\n" + ",".join([*names, "re_psi", "im_psi", "prob_density"])
    np.savetxt(target, table, fmt=CSV_FLOAT, delimiter=",", header=header, comments="")
    return target


def read_snapshot_csv(path: str | Path) -> WaveFunction:
    source = Path(path)
    try:
        with source.open(encoding="utf-8") as handle:
            first = handle.readline().strip()
        if not first.startswith(_META_PREFIX):
            raise CorruptSnapshot(f"{source} lacks the snapshot metadata line")
        meta = dict(_META_FIELD.findall(first))
        axes = [(int(meta["n"]), float(meta["x_min"]), float(meta["x_max"]))]
        if "ny" in meta:
            axes.append((int(meta["ny"]), float(meta["y_min"]), float(meta["y_max"])))
        table = np.loadtxt(source, delimiter=",", skiprows=2, ndmin=2)
    except (OSError, KeyError, ValueError) as exc:
        raise CorruptSnapshot(f"cannot parse snapshot {source}: {exc}") from exc

    try:
        grid = _grid_from_axes(axes)
    except InputError as exc:
        raise CorruptSnapshot(f"snapshot metadata describes an invalid grid: {exc}") from exc
    re_column = len(axes)
    if table.shape != (int(np.prod(grid.shape)), re_column + 3):
        raise CorruptSnapshot(f"{source} has table shape {table.shape} for grid {grid.shape}")
    amplitudes = np.empty(table.shape[0], dtype=np.complex128)
    amplitudes.real = table[:, re_column]
    amplitudes.imag = table[:, re_column + 1]
    amplitudes = amplitudes.reshape(grid.shape)
    return WaveFunction(grid, amplitudes, float(meta["t"]))


def write_snapshot(psi: WaveFunction, path: str | Path, fmt: SnapshotFormat) -> Path:
    if fmt == "binary":
        return write_snapshot_binary(psi, path)
    return write_snapshot_csv(psi, path)


def read_snapshot(path: str | Path) -> WaveFunction:
    """Read either format; ``.wvlb`` files are binary, anything else CSV."""
    if Path(path).suffix == BINARY_SUFFIX:
        return read_snapshot_binary(path)
    return read_snapshot_csv(path)


# ---------------------------------------------------------------------------
# Series and profiles
# ---------------------------------------------------------------------------


def write_table_csv(path: str | Path, columns: tuple[str, ...], table: np.ndarray) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(target, table, fmt=CSV_FLOAT, delimiter=",", header=",".join(columns), comments="")
    return target


def read_table_csv(path: str | Path) -> tuple[tuple[str, ...], np.ndarray]:
    source = Path(path)
    with source.open(encoding="utf-8") as handle:
        columns = tuple(handle.readline().strip().split(","))
    return columns, np.loadtxt(source, delimiter=",", skiprows=1, ndmin=2)


# ---------------------------------------------------------------------------
# Run directories
# ---------------------------------------------------------------------------


def resolve_output_dir(flag: str | Path | None, configured: str | Path | None) -> Path:
    """Flag beats config, config beats ``WAVELAB_OUTPUT_DIR``, which beats ``./output``."""
    for candidate in (flag, configured, os.environ.get("WAVELAB_OUTPUT_DIR")):
        if candidate:
            return Path(candidate)
    return Path("output")


def software_versions() -> dict[str, str]:
    return {
        "wavelab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


@dataclass
class RunDirectory:
    """Collects the files of one run; the manifest is written last, atomically."""

    root: Path
    files: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _track(self, path: Path) -> Path:
        self.files.append(path.relative_to(self.root).as_posix())
        return path

    def snapshot(self, psi: WaveFunction, index: int, fmt: SnapshotFormat) -> Path:
        suffix = BINARY_SUFFIX if fmt == "binary" else ".csv"
        return self._track(write_snapshot(psi, self.root / "snapshots" / f"snapshot_{index:05d}{suffix}", fmt))

    def table(self, name: str, columns: tuple[str, ...], table: np.ndarray) -> Path:
        return self._track(write_table_csv(self.root / name, columns, table))

    def document(self, name: str, payload: dict[str, Any]) -> Path:
        target = self.root / name
        target.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
        return self._track(target)

    def write_manifest(self, command: str, config: dict[str, Any], wall_time: float) -> Path:
        manifest = {
            "command": command,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "versions": software_versions(),
            "wall_time_seconds": wall_time,
            "config": config,
            "files": list(self.files),
        }
        target = self.root / "manifest.yaml"
        staging = target.with_name(target.name + ".tmp")
        staging.write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
        os.replace(staging, target)
        logger.info("Wrote %d files and manifest to %s", len(self.files), self.root)
        return target


def load_manifest(path: str | Path) -> dict[str, Any]:
    return yaml.safe_load(Path(path).read_text(encoding="utf-8"))
