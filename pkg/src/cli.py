"""Command-line interface for wavelab.

Exit codes: 0 success, 1 a ``--check`` failed, 2 bad configuration or
arguments, 3 failure during a run or an unreadable snapshot.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from src.errors import InputError, WaveLabError

logger = logging.getLogger("wavelab.cli")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

CHECK_NORM_TOLERANCE = 1e-6


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavelab",
        description="wavelab - wave mechanics simulations and old quantum theory tables",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # --- evolve command ---
    evolve_parser = subparsers.add_parser(
        "evolve",
        help="Run one or more time-evolution configs",
    )
    evolve_parser.add_argument("configs", type=Path, nargs="+", help="YAML run configs")
    evolve_parser.add_argument(
        "--output-dir",
        "-o",
        type=Path,
        default=None,
        help="Output directory (default: output.dir, then $WAVELAB_OUTPUT_DIR, then ./output)",
    )
    evolve_parser.add_argument(
        "--format",
        choices=["csv", "binary"],
        default=None,
        help="Snapshot format (default: output.format from the config)",
    )
    evolve_parser.add_argument(
        "--scheme",
        choices=["split_step", "crank_nicolson"],
        default=None,
        help="Override time.scheme",
    )
    evolve_parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Configs evolved concurrently (default: 1)",
    )

    # --- dispersion-gate command ---
    gate_parser = subparsers.add_parser(
        "dispersion-gate",
        help="Test which time order gives a wavenumber-independent coefficient",
    )
    gate_parser.add_argument("--k", type=float, nargs="+", required=True, help="Wavenumbers to sample")
    gate_parser.add_argument("--hbar", type=float, default=1.0, help="Reduced Planck constant (default: 1)")
    gate_parser.add_argument("--mass", type=float, default=1.0, help="Particle mass (default: 1)")
    gate_parser.add_argument("--tolerance", type=float, default=None, help="Spread tolerance (default: 1e-12)")
    gate_parser.add_argument(
        "--machine",
        action="store_true",
        help="Print flat key=value lines instead of tables",
    )

    # --- spectra command ---
    spectra_parser = subparsers.add_parser("spectra", help="Hydrogen spectral lines")
    spectra_parser.add_argument("--series", default=None, help="lyman, balmer, paschen, brackett or pfund")
    spectra_parser.add_argument("--max-upper", type=int, default=7, help="Highest upper level (default: 7)")
    spectra_parser.add_argument("--upper", type=int, default=None, help="Upper level of a single line")
    spectra_parser.add_argument("--lower", type=int, default=None, help="Lower level of a single line")
    spectra_parser.add_argument("--csv", type=Path, default=None, help="Also write the table as CSV")

    # --- bohr command ---
    bohr_parser = subparsers.add_parser("bohr", help="Bohr orbit radii, speeds and energies")
    bohr_parser.add_argument("--n", type=int, nargs="+", required=True, help="Quantum numbers")
    bohr_parser.add_argument("--csv", type=Path, default=None, help="Also write the table as CSV")

    # --- photoelectric command ---
    photo_parser = subparsers.add_parser("photoelectric", help="Photoelectric emission check")
    photo_parser.add_argument("--work-function-ev", type=float, required=True, help="Work function in eV")
    photon = photo_parser.add_mutually_exclusive_group(required=True)
    photon.add_argument("--photon-ev", type=float, help="Photon energy in eV")
    photon.add_argument("--frequency", type=float, help="Photon frequency in Hz")

    # --- double-slit command ---
    slit_parser = subparsers.add_parser("double-slit", help="Run the two-slit experiment")
    slit_parser.add_argument("config", type=Path, help="YAML run config with a screen section")
    slit_parser.add_argument("--output-dir", "-o", type=Path, default=None, help="Output directory")
    slit_parser.add_argument(
        "--single-slit",
        nargs="?",
        const="lower",
        choices=["upper", "lower"],
        default=None,
        help="Close one slit (default when given: lower)",
    )

    # --- observables command ---
    obs_parser = subparsers.add_parser("observables", help="Report observables of a snapshot file")
    obs_parser.add_argument("--snapshot", type=Path, required=True, help="Snapshot (.csv or .wvlb)")
    obs_parser.add_argument("--config", type=Path, default=None, help="Run config supplying potential and constants")
    obs_parser.add_argument("--hbar", type=float, default=None, help="Override hbar")
    obs_parser.add_argument("--mass", type=float, default=None, help="Override particle mass")
    obs_parser.add_argument(
        "--check",
        action="store_true",
        help="Exit 1 unless the norm is 1 and the uncertainty relation holds",
    )

    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _error(message: object) -> None:
    print(f"Error: {message}", file=sys.stderr)


def print_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """Right-aligned text table; floats use 10 significant digits."""

    def cell(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.10g}"
        return str(value)

    text = [[cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in text)) for i, h in enumerate(headers)]
    print("  ".join(h.rjust(w) for h, w in zip(headers, widths)))
    for row in text:
        print("  ".join(v.rjust(w) for v, w in zip(row, widths)))


def format_complex(value: complex) -> str:
    """``a+bi`` with signed zeros folded to ``0``."""
    return f"{value.real + 0.0:.12g}{value.imag + 0.0:+.12g}i"


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------


def _evolve_one(config_path: Path, args: argparse.Namespace, output_dir: Path | None) -> int:
    from src.config import load_run_config
    from src.evolve import evolve, prepare
    from src.snapshots import RunDirectory, resolve_output_dir

    started = time.perf_counter()
    try:
        config = load_run_config(config_path)
        if args.scheme is not None:
            config = config.model_copy(
                update={"time": config.time.model_copy(update={"scheme": args.scheme})}
            )
        sim = config.to_sim_config()
        prepare(sim)
        fmt = args.format or config.output.format
        root = output_dir or resolve_output_dir(None, config.output.dir)
    except InputError as exc:
        _error(f"{config_path}: {exc}")
        return EXIT_CONFIG

    try:
        trajectory = evolve(sim)
        run = RunDirectory(root)
        for index, psi in enumerate(trajectory.snapshots):
            run.snapshot(psi, index, fmt)
        run.table("series.csv", trajectory.series.COLUMNS, trajectory.series.as_table())
        run.write_manifest("evolve", config.echo(), time.perf_counter() - started)
    except (WaveLabError, OSError) as exc:
        _error(f"{config_path}: {exc}")
        return EXIT_RUNTIME

    print(f"{config_path}: {len(trajectory.snapshots)} snapshots, series in {root / 'series.csv'}")
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    """Execute the *evolve* sub-command; several configs run concurrently."""
    from src.snapshots import resolve_output_dir

    if args.workers < 1:
        _error("--workers must be at least 1")
        return EXIT_CONFIG

    configs: list[Path] = args.configs
    if len(configs) == 1:
        return _evolve_one(configs[0], args, args.output_dir)

    base = args.output_dir
    stems = [path.stem for path in configs]
    if len(set(stems)) != len(stems):
        _error("config file names must be distinct when evolving several at once")
        return EXIT_CONFIG

    def run(path: Path) -> int:
        root = base / path.stem if base is not None else None
        if root is None:
            from src.config import load_run_config

            try:
                configured = load_run_config(path).output.dir
            except InputError as exc:
                _error(f"{path}: {exc}")
                return EXIT_CONFIG
            root = resolve_output_dir(None, configured) / path.stem
        return _evolve_one(path, args, root)

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        codes = list(pool.map(run, configs))
    return max(codes)


# ---------------------------------------------------------------------------
# dispersion-gate
# ---------------------------------------------------------------------------


def cmd_dispersion_gate(args: argparse.Namespace) -> int:
    """Execute the *dispersion-gate* sub-command."""
    from src.core import constants
    from src.derivation_gate import GATE_TOLERANCE, run_gate

    if len(set(args.k)) < 3:
        _error("--k needs at least 3 distinct nonzero wavenumbers")
        return EXIT_CONFIG
    try:
        table = constants("natural", mass=args.mass, hbar=args.hbar)
        tolerance = GATE_TOLERANCE if args.tolerance is None else args.tolerance
        reports = run_gate(args.k, table, tolerance)
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG

    for report in reports:
        if args.machine:
            for trial in report.gamma_samples:
                print(
                    f"candidate={report.candidate} k={trial.k:.12g} "
                    f"omega={trial.omega:.12g} gamma={format_complex(trial.gamma)}"
                )
            print(
                f"candidate={report.candidate} spread={report.max_pairwise_spread:.6g} "
                f"verdict={report.verdict}"
            )
            continue
        print(f"{report.candidate}: {report.verdict} (spread {report.max_pairwise_spread:.3g})")
        print_table(
            ["k", "omega", "gamma"],
            [(t.k, t.omega, format_complex(t.gamma)) for t in report.gamma_samples],
        )
        print()
    return EXIT_OK


# ---------------------------------------------------------------------------
# Old quantum theory tables
# ---------------------------------------------------------------------------


def _write_csv(path: Path, headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    from src.snapshots import write_table_csv

    write_table_csv(path, tuple(headers), np.array(rows, dtype=np.float64))
    print(f"Table written to: {path}")


def cmd_spectra(args: argparse.Namespace) -> int:
    """Execute the *spectra* sub-command."""
    from src.core import constants
    from src.oldquantum import joules_to_ev, spectral_series, transition

    si = constants("si")
    try:
        if args.series is not None:
            lines = spectral_series(args.series, args.max_upper, si)
        elif args.upper is not None and args.lower is not None:
            lines = [transition(args.upper, args.lower, si)]
        else:
            _error("give --series NAME or both --upper and --lower")
            return EXIT_CONFIG
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG

    headers = ["n_upper", "n_lower", "wavelength_nm", "frequency_hz", "energy_ev", "visible"]
    rows = [
        (
            line.n_upper,
            line.n_lower,
            line.wavelength_nm,
            line.frequency,
            joules_to_ev(line.E_gamma, si),
            "yes" if line.is_visible else "no",
        )
        for line in lines
    ]
    print_table(headers, rows)
    if args.csv is not None:
        _write_csv(args.csv, headers, [(*row[:5], float(row[5] == "yes")) for row in rows])
    return EXIT_OK


def cmd_bohr(args: argparse.Namespace) -> int:
    """Execute the *bohr* sub-command."""
    from src.core import constants
    from src.oldquantum import bohr_state, joules_to_ev

    si = constants("si")
    try:
        states = [bohr_state(n, si) for n in args.n]
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG

    headers = ["n", "r_m", "r_over_a0", "energy_ev", "speed_m_s", "L_over_hbar"]
    rows = [
        (s.n, s.r_n, s.r_n / si.require("a0"), joules_to_ev(s.E_n, si), s.v_n, s.L_n / si.hbar)
        for s in states
    ]
    print_table(headers, rows)
    if args.csv is not None:
        _write_csv(args.csv, headers, rows)
    return EXIT_OK


def cmd_photoelectric(args: argparse.Namespace) -> int:
    """Execute the *photoelectric* sub-command."""
    from src.core import constants
    from src.oldquantum import ev_to_joules, joules_to_ev, photoelectric

    si = constants("si")
    try:
        work_function = ev_to_joules(args.work_function_ev, si)
        if args.photon_ev is not None:
            result = photoelectric(work_function, si, energy=ev_to_joules(args.photon_ev, si))
        else:
            result = photoelectric(work_function, si, frequency=args.frequency)
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG

    print(f"photon energy:       {joules_to_ev(result.photon_energy, si):.6g} eV")
    print(f"work function:       {args.work_function_ev:.6g} eV")
    print(f"threshold frequency: {result.threshold_frequency:.6g} Hz")
    if result.emitted and result.ke_max is not None:
        print(f"emission: yes, KE_max = {joules_to_ev(result.ke_max, si):.6g} eV")
    else:
        print("no emission")
    return EXIT_OK


# ---------------------------------------------------------------------------
# double-slit
# ---------------------------------------------------------------------------


def cmd_double_slit(args: argparse.Namespace) -> int:
    """Execute the *double-slit* sub-command."""
    from src.config import load_run_config
    from src.double_slit import DoubleSlitConfig, analyze_fringes, describe, double_slit_run
    from src.errors import ConfigError
    from src.snapshots import RunDirectory, resolve_output_dir

    started = time.perf_counter()
    try:
        config = load_run_config(args.config)
        if config.screen is None:
            raise ConfigError("screen", "a screen section is required for the two-slit run")
        if args.single_slit is not None:
            config = config.model_copy(
                update={"potential": config.potential.model_copy(update={"closed_slit": args.single_slit})}
            )
        slit_config = DoubleSlitConfig(sim=config.to_sim_config(), screen=config.screen)
        root = resolve_output_dir(args.output_dir, config.output.dir)
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG

    try:
        profile = double_slit_run(slit_config)
        analysis = analyze_fringes(profile)
        run = RunDirectory(root)
        run.table("profile.csv", ("y", "intensity"), np.column_stack([profile.y, profile.intensity]))
        run.document("fringes.yaml", describe(analysis))
        run.write_manifest("double-slit", config.echo(), time.perf_counter() - started)
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG
    except (WaveLabError, OSError) as exc:
        _error(exc)
        return EXIT_RUNTIME

    print(f"maxima found:      {len(analysis.maxima)}")
    if analysis.central is not None:
        print(f"central maximum:   y = {analysis.central:.6g}")
    if analysis.spacing is not None:
        print(f"fringe spacing:    {analysis.spacing:.6g} (far field {analysis.predicted_spacing:.6g})")
    print(f"profile written to: {root / 'profile.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------


def cmd_observables(args: argparse.Namespace) -> int:
    """Execute the *observables* sub-command."""
    from src.config import load_run_config
    from src.core import constants
    from src.evolve import Potential, build_potential
    from src.observe import observables
    from src.snapshots import read_snapshot

    try:
        psi = read_snapshot(args.snapshot)
    except WaveLabError as exc:
        _error(exc)
        return EXIT_RUNTIME

    try:
        if args.config is not None:
            config = load_run_config(args.config)
            table = config.build_constants().with_particle(mass=args.mass, hbar=args.hbar)
            potential = build_potential(config.potential, psi.grid, table)
        else:
            table = constants("natural", mass=args.mass, hbar=args.hbar)
            potential = Potential("free", psi.grid, np.zeros(psi.grid.shape))
    except InputError as exc:
        _error(exc)
        return EXIT_CONFIG

    try:
        report = observables(psi, potential, table)
    except WaveLabError as exc:
        _error(exc)
        return EXIT_RUNTIME

    rows = [
        ("t", psi.t),
        ("norm", report.norm),
        ("x_mean", report.x_mean),
        ("x_var", report.x_var),
        ("p_mean", report.p_mean),
        ("p_var", report.p_var),
        ("kinetic", report.kinetic_energy),
        ("potential", report.potential_energy),
        ("total", report.total_energy),
        ("dx_dp", report.uncertainty_product),
    ]
    print_table(["observable", "value"], rows)

    if not args.check:
        return EXIT_OK
    failures = []
    if abs(report.norm - 1.0) > CHECK_NORM_TOLERANCE:
        failures.append(f"norm {report.norm:.12g} differs from 1")
    if not report.satisfies_uncertainty(table.hbar):
        failures.append(f"dx*dp = {report.uncertainty_product:.6g} is below hbar/2")
    for failure in failures:
        print(f"CHECK FAILED: {failure}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(name)s] %(levelname)s: %(message)s",
        stream=sys.stderr,
    )

    dispatch = {
        "evolve": cmd_evolve,
        "dispersion-gate": cmd_dispersion_gate,
        "spectra": cmd_spectra,
        "bohr": cmd_bohr,
        "photoelectric": cmd_photoelectric,
        "double-slit": cmd_double_slit,
        "observables": cmd_observables,
    }
    return dispatch[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
