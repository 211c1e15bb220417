"""RSWE-SNAP v1 snapshot files and JSON trajectory manifests.

A snapshot is a plain-text file with a six-line header followed by the
``u``, ``v`` and elevation blocks, each ``ny`` rows of ``nx`` values.  A
manifest lists the snapshot files of one trajectory together with the
physical parameters, grid and (for runs made here) the solver config.
"""

from __future__ import annotations

import json
import os
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .metrics import ELEVATION_KINDS, convert_elevation
from .solver import SolverConfig, Trajectory
from .spectral_core import GridSpec, PhysicalParams, to_spectral

MAGIC = "RSWE-SNAP 1"
BLOCKS = ("u", "v", "phi")
ELEVATIONS = ("phi",) + ELEVATION_KINDS
MANIFEST_FORMAT = "rswe-trajectory 1"


class SnapshotFormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_snapshot(path, fields: np.ndarray, t: float, params: PhysicalParams, grid: GridSpec) -> None:
    """Write physical fields of shape ``(3, ny, nx)`` at time ``t``."""
    fields = np.asarray(fields, float)
    if fields.shape != (3,) + grid.shape:
        raise ValueError(f"fields shape {fields.shape} does not match grid {(3,) + grid.shape}")
    lines = [
        MAGIC,
        f"{grid.nx} {grid.ny}",
        f"{_fmt(grid.lx)} {_fmt(grid.ly)}",
        _fmt(t),
        f"{_fmt(params.f)} {_fmt(params.g)} {_fmt(params.H0)}",
        "layout row-major",
    ]
    for name, block in zip(BLOCKS, fields):
        lines.append(name)
        lines.extend(" ".join(_fmt(v) for v in row) for row in block)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_snapshot(path) -> Tuple[np.ndarray, float, PhysicalParams, GridSpec]:
    """Parse a snapshot file; returns ``(fields, t, params, grid)``."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 6 or lines[0].strip() != MAGIC:
        raise SnapshotFormatError(f"{path}: not an {MAGIC} file")
    try:
        nx, ny = (int(s) for s in lines[1].split())
        lx, ly = (float(s) for s in lines[2].split())
        t = float(lines[3])
        f, g, H0 = (float(s) for s in lines[4].split())
    except ValueError as exc:
        raise SnapshotFormatError(f"{path}: malformed header ({exc})") from None
    if lines[5].strip() != "layout row-major":
        raise SnapshotFormatError(f"{path}: unsupported layout {lines[5]!r}")
    grid = GridSpec(nx, ny, lx, ly)
    params = PhysicalParams(f, g, H0)
    body = [ln for ln in lines[6:] if ln.strip()]
    if len(body) != 3 * (ny + 1):
        raise SnapshotFormatError(f"{path}: expected {3 * (ny + 1)} body lines, found {len(body)}")
    fields = np.empty((3, ny, nx))
    for b, name in enumerate(BLOCKS):
        start = b * (ny + 1)
        if body[start].strip() != name:
            raise SnapshotFormatError(f"{path}: expected block {name!r}, found {body[start]!r}")
        for r in range(ny):
            row = body[start + 1 + r].split()
            if len(row) != nx:
                raise SnapshotFormatError(f"{path}: block {name!r} row {r} has {len(row)} values, expected {nx}")
            fields[b, r] = [float(v) for v in row]
    return fields, t, params, grid


def config_to_dict(config: Optional[SolverConfig]) -> Optional[dict]:
    if config is None:
        return None
    return {
        "scheme": config.scheme.name,
        "dt": config.dt,
        "t_end": config.t_end,
        "mu": config.mu,
        "dealias": config.dealias,
        "sample_interval": config.sample_interval,
        "tol": config.tol,
        "max_iter": config.max_iter,
        "nonlinear": config.nonlinear,
    }


def config_from_dict(d: Optional[dict]) -> Optional[SolverConfig]:
    if d is None:
        return None
    return SolverConfig(**d)


def write_trajectory(traj: Trajectory, directory, case_id: Optional[str] = None, stem: str = "snap") -> str:
    """Write every sample of ``traj`` as a snapshot plus ``manifest.json``; returns the manifest path."""
    os.makedirs(directory, exist_ok=True)
    width = max(5, len(str(len(traj) - 1)))
    entries = []
    for n in range(len(traj)):
        name = f"{stem}_{n:0{width}d}.txt"
        write_snapshot(os.path.join(directory, name), traj.physical(n), float(traj.times[n]), traj.params, traj.grid)
        entries.append({"t": float(traj.times[n]), "file": name})
    manifest = {
        "format": MANIFEST_FORMAT,
        "elevation": "phi",
        "case": case_id,
        "params": {"f": traj.params.f, "g": traj.params.g, "H0": traj.params.H0},
        "grid": {"nx": traj.grid.nx, "ny": traj.grid.ny, "lx": traj.grid.lx, "ly": traj.grid.ly},
        "config": config_to_dict(traj.config),
        "snapshots": entries,
    }
    path = os.path.join(directory, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def write_manifest(path, files: Sequence[str], times: Sequence[float], params: PhysicalParams, grid: GridSpec,
                   elevation: str = "phi", case_id: Optional[str] = None) -> None:
    """Manifest for snapshot files written elsewhere (e.g. by an external model)."""
    if elevation not in ELEVATIONS:
        raise ValueError(f"unknown elevation kind {elevation!r}; expected one of {ELEVATIONS}")
    manifest = {
        "format": MANIFEST_FORMAT,
        "elevation": elevation,
        "case": case_id,
        "params": {"f": params.f, "g": params.g, "H0": params.H0},
        "grid": {"nx": grid.nx, "ny": grid.ny, "lx": grid.lx, "ly": grid.ly},
        "config": None,
        "snapshots": [{"t": float(t), "file": str(f)} for f, t in zip(files, times)],
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_trajectory(manifest_path, elevation: Optional[str] = None) -> Trajectory:
    """Read a manifest and its snapshots into a :class:`Trajectory`.

    ``elevation`` overrides the manifest's elevation kind.  Non-``phi``
    elevations are converted to the symmetrised geopotential before the
    transform to spectral space.
    """
    with open(manifest_path) as fh:
        try:
            m = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SnapshotFormatError(f"{manifest_path}: invalid JSON ({exc})") from None
    if m.get("format") != MANIFEST_FORMAT:
        raise SnapshotFormatError(f"{manifest_path}: unknown manifest format {m.get('format')!r}")
    kind = elevation or m.get("elevation", "phi")
    if kind not in ELEVATIONS:
        raise SnapshotFormatError(f"{manifest_path}: unknown elevation kind {kind!r}")
    params = PhysicalParams(**m["params"])
    grid = GridSpec(**m["grid"])
    base = os.path.dirname(os.path.abspath(manifest_path))
    times, coeffs = [], []
    for entry in m["snapshots"]:
        path = os.path.join(base, entry["file"])
        fields, t, p, g = read_snapshot(path)
        if g != grid or p != params:
            raise SnapshotFormatError(f"{path}: grid or parameters differ from the manifest")
        if kind != "phi":
            fields[2] = convert_elevation(kind, fields[2], params)
        times.append(t)
        coeffs.append(to_spectral(fields))
    if not coeffs:
        raise SnapshotFormatError(f"{manifest_path}: no snapshots listed")
    meta = {"case": m.get("case"), "elevation": kind, "manifest": os.path.abspath(manifest_path)}
    return Trajectory(np.array(times), np.stack(coeffs), config_from_dict(m.get("config")), params, grid, meta)
