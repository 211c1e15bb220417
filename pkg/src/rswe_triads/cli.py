"""Command-line front end: ``rswe-triads <command> ...``.

Exit codes: 0 on success, 2 for configuration or input errors, 3 when a
time integration fails numerically.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional

import numpy as np

from .config import ConfigError, RunConfig, load_run_config
from .metrics import ELEVATION_KINDS, spectral_difference, total_spectral_error
from .snapshots import SnapshotFormatError, load_trajectory, write_trajectory
from .solver import NumericalFailure, integrate
from .spectral_core import GridSpec, PhysicalParams, frequency_grid, to_spectral
from .stability import Scheme
from .testcases import CASE_IDS, CASE_PARAMS, canonical_case
from .triadic_error import average_triadic_error
from .triads import INTERACTION_TYPES, enumerate_triads, expand_type_filter, frequency_ranges

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _floats(text: str) -> List[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse number list {text!r}") from None


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _setup(args):
    """Physical parameters and grid from ``--config`` or the grid flags."""
    if args.config:
        rc = load_run_config(args.config)
        return rc.params, rc.grid
    if args.nondimensional:
        params = PhysicalParams.nondimensional(args.epsilon)
    else:
        params = CASE_PARAMS
    ny = args.nx if args.ny is None else args.ny
    try:
        grid = GridSpec(args.nx, ny, args.length, args.length if ny > 1 else 2 * math.pi)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return params, grid


def cmd_dispersion(args) -> int:
    params, grid = _setup(args)
    psi = frequency_grid(params, grid)
    path = _out_path(args, "dispersion.csv")
    rows = []
    for zx in grid.index_range("x"):
        for zy in grid.index_range("y"):
            w = psi[grid.fft_index(zx, zy)]
            for a in (-1, 0, 1):
                rows.append(f"{zx},{zy},{a},{float(a * w)!r}\n")
    with open(path, "w") as fh:
        fh.write("zx,zy,alpha,omega\n")
        fh.writelines(rows)
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def cmd_enumerate_triads(args) -> int:
    params, grid = _setup(args)
    types = args.types.split(",") if args.types else None
    try:
        wanted = expand_type_filter(types)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    summary = []
    if math.isfinite(args.omega_cutoff) or args.all_rows:
        sub = enumerate_triads(params, grid, types=types, omega_cutoff=args.omega_cutoff, jobs=args.jobs)
        path = _out_path(args, "triads.csv")
        with open(path, "w") as fh:
            sub.write_csv(fh)
        print(f"wrote {len(sub)} triads to {path}")
        tcodes = sub.types
        for t in wanted:
            om = np.abs(sub.omega[tcodes == t])
            lo, hi = (float(om.min()), float(om.max())) if om.size else (math.nan, math.nan)
            summary.append((t, str(om.size), lo, hi))
    else:
        # the slow-slow-slow type is listed too; it has Omega = 0 identically
        ranges = frequency_ranges(params, grid, types=wanted if types else ["all"], jobs=args.jobs)
        summary = [(t, "", lo, hi) for t, (lo, hi) in ranges.items()]
    path = _out_path(args, "triad_summary.csv")
    with open(path, "w") as fh:
        fh.write("type,n_triads,omega_min,omega_max\n")
        for t, n, lo, hi in summary:
            fh.write(f"{t},{n},{lo!r},{hi!r}\n")
    print(f"{'type':>6} {'count':>10} {'min |Omega|':>12} {'max |Omega|':>12}")
    for t, n, lo, hi in summary:
        print(f"{t:>6} {n:>10} {lo:12.2f} {hi:12.2f}")
    return EXIT_OK


def cmd_triad_error(args) -> int:
    params, grid = _setup(args)
    try:
        schemes = [Scheme.parse(s) for s in args.schemes.split(",")]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    dts = _floats(args.dts)
    cutoffs = _floats(args.cutoffs)
    if not dts or any(dt <= 0 for dt in dts):
        raise ConfigError("--dts needs positive timesteps")
    types = args.types.split(",") if args.types else None
    subsets = [enumerate_triads(params, grid, types=types, omega_cutoff=c, jobs=args.jobs) for c in cutoffs]
    cells = [(sub, s, dt) for sub in subsets for s in schemes for dt in dts]

    def run(cell):
        sub, s, dt = cell
        return average_triadic_error(s, sub, dt) if len(sub) else math.nan

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        errors = list(pool.map(run, cells))
    path = _out_path(args, "triad_error.csv")
    with open(path, "w") as fh:
        fh.write("scheme,dt,omega_c,mean_error,n_triads\n")
        for (sub, s, dt), e in zip(cells, errors):
            fh.write(f"{s.name},{dt!r},{sub.cutoff!r},{e!r},{len(sub)}\n")
    print(f"wrote {len(cells)} rows to {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if not args.config and not args.case:
        raise ConfigError("simulate needs --config or --case")
    if args.config:
        rc = load_run_config(args.config)
    else:
        if args.case not in CASE_IDS:
            raise ConfigError(f"unknown case id {args.case!r}")
        rc = RunConfig.from_case(canonical_case(args.case))
    solver = rc.solver
    if args.seed_reference:
        solver = replace(solver, scheme=Scheme.rk(4), dt=rc.case().reference_dt)
    if args.t_end is not None:
        solver = replace(solver, t_end=args.t_end)
    out = args.out or rc.out_dir
    traj = integrate(to_spectral(rc.initial_fields()), solver, rc.params, rc.grid)
    path = write_trajectory(traj, out, case_id=rc.case_id)
    print(f"wrote {len(traj)} snapshots; manifest {path}")
    return EXIT_OK


def cmd_spectral_error(args) -> int:
    try:
        ref = load_trajectory(args.reference, elevation=args.ref_elevation)
        test = load_trajectory(args.test, elevation=args.elevation)
    except (OSError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot load trajectory: {exc}") from None
    dealiased = {"auto": None, "on": True, "off": False}[args.dealiased]
    try:
        series = total_spectral_error(ref, test, dealiased=dealiased)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    path = _out_path(args, "error_series.csv")
    with open(path, "w") as fh:
        series.write_csv(fh)
    with open(_out_path(args, "spectral_error.csv"), "w") as fh:
        fh.write("scheme,dt,SE\n")
        fh.write(f"{series.scheme},{series.dt!r},{series.SE!r}\n")
    if args.map:
        d = spectral_difference(ref.final, test.final, ref.params, ref.grid,
                                dealiased=bool(dealiased) if dealiased is not None else False)
        with open(_out_path(args, "spectral_map.csv"), "w") as fh:
            d.write_csv(fh)
    print(f"SE = {series.SE!r} over {len(series.times)} samples")
    return EXIT_OK


def cmd_case_emit(args) -> int:
    if args.case_id not in CASE_IDS:
        raise ConfigError(f"unknown case id {args.case_id!r}; expected one of {CASE_IDS}")
    try:
        rc = RunConfig.from_case(canonical_case(args.case_id), scheme=args.scheme, dt=args.dt)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = rc.to_ini()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        path = _out_path(args, f"{args.case_id}.ini")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}")
    return EXIT_OK


def _add_grid_flags(p):
    p.add_argument("--config", help="INI run config supplying [physics] and [grid]")
    p.add_argument("--nondimensional", action="store_true", help="use f = c = 1/epsilon instead of the case parameters")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--nx", type=int, default=32)
    p.add_argument("--ny", type=int, default=None, help="defaults to nx")
    p.add_argument("--length", type=float, default=2 * math.pi, help="domain side length")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rswe-triads", description="Triadic timestepping analysis for the rotating shallow water equations")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", parents=[common], help="frequencies of every resolvable wave")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("enumerate-triads", parents=[common], help="triads and their frequency ranges per interaction type")
    _add_grid_flags(p)
    p.add_argument("--types", help=f"comma list from {INTERACTION_TYPES}, 'ii', 'all'")
    p.add_argument("--omega-cutoff", type=float, default=math.inf)
    p.add_argument("--all-rows", action="store_true", help="write every triad even without a cutoff")
    p.set_defaults(func=cmd_enumerate_triads)

    p = sub.add_parser("triad-error", parents=[common], help="mean triadic error over dominant subsets")
    _add_grid_flags(p)
    p.add_argument("--schemes", default="RK3,RK4,AB3,TRBDF2,TRAP,ETD")
    p.add_argument("--dts", default="0.001,0.002,0.005,0.01")
    p.add_argument("--cutoffs", default="0.1,5")
    p.add_argument("--types")
    p.set_defaults(func=cmd_triad_error)

    p = sub.add_parser("simulate", help="integrate a run config and write snapshots")
    p.add_argument("--out", default=None, help="output directory (default: [output] dir of the config)")
    p.add_argument("--config")
    p.add_argument("--case", help="canonical case id, used when no config is given")
    p.add_argument("--seed-reference", action="store_true", help="run the RK4 reference (dt = 1e-4) instead")
    p.add_argument("--t-end", type=float, default=None, help="override the run length")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectral-error", parents=[common], help="spectral-coefficient error between two trajectories")
    p.add_argument("reference", help="reference manifest.json")
    p.add_argument("test", help="test manifest.json")
    p.add_argument("--elevation", choices=("phi",) + ELEVATION_KINDS, help="elevation kind of the test snapshots")
    p.add_argument("--ref-elevation", choices=("phi",) + ELEVATION_KINDS)
    p.add_argument("--dealiased", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--map", action="store_true", help="also write per-wave differences at the final sample")
    p.set_defaults(func=cmd_spectral_error)

    p = sub.add_parser("case", help="canonical test cases")
    csub = p.add_subparsers(dest="case_command", required=True)
    e = csub.add_parser("emit", help="write the run config of a canonical case")
    e.add_argument("case_id")
    e.add_argument("--out", default="-", help="output directory, or - for stdout")
    e.add_argument("--scheme", default="RK4")
    e.add_argument("--dt", type=float, default=None)
    e.set_defaults(func=cmd_case_emit)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SnapshotFormatError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure ({exc.scheme} at t={exc.t:.6g}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
