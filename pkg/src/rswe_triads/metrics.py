"""Spectral-coefficient error metrics and diagnostics for RSWE trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .spectral_core import ALPHAS, GridSpec, PhysicalParams, eigenbasis, project_modes

ELEVATION_KINDS = ("depth_D", "geopotential_phiL", "height_h")


def error_region(grid: GridSpec, dealiased: bool) -> np.ndarray:
    """Wavenumbers that enter the error sum: all but Nyquist, or the two-thirds box."""
    mask = grid.nyquist_mask()
    if dealiased:
        mask &= grid.dealias_mask()
    return mask


@dataclass
class SpectralDiffMap:
    """Per-(k, alpha) differences ``|sigma_ref - sigma_test|`` at one time."""

    values: np.ndarray  # (3, ny, nx) over alpha = -1, 0, +1
    region: np.ndarray  # (ny, nx) bool, wavenumbers included in the total
    grid: GridSpec

    @property
    def total(self) -> float:
        return float(np.sum(self.values[:, self.region]))

    def fast(self) -> np.ndarray:
        """Fast-mode differences summed over both branches, shape ``(ny, nx)``."""
        return self.values[0] + self.values[2]

    def write_csv(self, stream) -> None:
        """Rows ``zx, zy, alpha, dsigma`` ordered by ``(zx, zy, alpha)``."""
        stream.write("zx,zy,alpha,dsigma\n")
        g = self.grid
        zx = np.broadcast_to(g.zx, g.shape)
        zy = np.broadcast_to(g.zy, g.shape)
        rows, cols = np.nonzero(self.region)
        order = np.lexsort((zy[rows, cols], zx[rows, cols]))
        for r, c in zip(rows[order], cols[order]):
            for m, a in enumerate(ALPHAS):
                stream.write(f"{zx[r, c]},{zy[r, c]},{a},{float(self.values[m, r, c])!r}\n")


def _check_grid(a: np.ndarray, grid: GridSpec):
    if a.shape != (3,) + grid.shape:
        raise ValueError(f"state shape {a.shape} does not match grid {(3,) + grid.shape}")


def spectral_difference(
    ref_coeffs: np.ndarray,
    test_coeffs: np.ndarray,
    params: PhysicalParams,
    grid: GridSpec,
    dealiased: bool = False,
    basis: Optional[np.ndarray] = None,
) -> SpectralDiffMap:
    """``|sigma_ref - sigma_test|`` for every wave; zero outside the error region."""
    ref_coeffs = np.asarray(ref_coeffs)
    test_coeffs = np.asarray(test_coeffs)
    _check_grid(ref_coeffs, grid)
    _check_grid(test_coeffs, grid)
    if basis is None:
        basis = eigenbasis(params, grid)
    # projection is linear, so project the difference directly
    d = np.abs(project_modes(ref_coeffs - test_coeffs, basis))
    region = error_region(grid, dealiased)
    d[:, ~region] = 0.0
    return SpectralDiffMap(d, region, grid)


@dataclass
class ErrorSeries:
    """Per-sample summed spectral differences and their mean ``SE``."""

    scheme: str
    dt: float
    times: np.ndarray
    totals: np.ndarray

    @property
    def SE(self) -> float:
        return float(np.mean(self.totals))

    def write_csv(self, stream) -> None:
        stream.write("scheme,dt,t,total\n")
        for t, v in zip(self.times, self.totals):
            stream.write(f"{self.scheme},{self.dt!r},{float(t)!r},{float(v)!r}\n")


def _traj_dt(traj) -> float:
    cfg = getattr(traj, "config", None)
    return float(cfg.dt) if cfg is not None else 0.0


def total_spectral_error(ref_traj, test_traj, dealiased: Optional[bool] = None) -> ErrorSeries:
    """Mean over samples of the summed ``|delta sigma|`` between two trajectories.

    Both trajectories must share the grid, parameters and sample times (to
    within half the larger timestep).  ``dealiased`` defaults to the test
    run's dealiasing flag.
    """
    grid, params = ref_traj.grid, ref_traj.params
    if test_traj.grid != grid:
        raise ValueError("trajectories are on different grids")
    if test_traj.params != params:
        raise ValueError("trajectories use different physical parameters")
    if len(ref_traj.times) != len(test_traj.times):
        raise ValueError(f"sample schedules differ: {len(ref_traj.times)} vs {len(test_traj.times)} samples")
    # a sample may sit up to dt/2 from n * dT; allow rounding in the times themselves
    tol = 0.5 * max(_traj_dt(ref_traj), _traj_dt(test_traj), 1e-12) * (1 + 1e-9)
    if np.any(np.abs(np.asarray(ref_traj.times) - np.asarray(test_traj.times)) > tol):
        raise ValueError("sample schedules differ")
    if dealiased is None:
        cfg = getattr(test_traj, "config", None)
        dealiased = bool(cfg.dealias) if cfg is not None else False
    basis = eigenbasis(params, grid)
    region = error_region(grid, dealiased)
    totals = np.empty(len(ref_traj.times))
    for n in range(len(totals)):
        d = np.abs(project_modes(ref_traj.coeffs[n] - test_traj.coeffs[n], basis))
        totals[n] = np.sum(d[:, region])
    cfg = getattr(test_traj, "config", None)
    name = cfg.scheme.name if cfg is not None else "external"
    return ErrorSeries(name, _traj_dt(test_traj), np.asarray(test_traj.times, float), totals)


def convert_elevation(kind: str, field: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """Symmetrised geopotential ``phi`` from a model's elevation variable.

    ``depth_D``: ``sqrt(g/H0) (D - H0)``; ``geopotential_phiL``:
    ``sqrt(g/H0) (phi_L/g - H0)``; ``height_h``: ``sqrt(g/H0) (h - H0)``.
    """
    field = np.asarray(field, float)
    s = params.phi_scale
    if kind in ("depth_D", "height_h"):
        return s * (field - params.H0)
    if kind == "geopotential_phiL":
        return s * (field / params.g - params.H0)
    raise ValueError(f"unknown elevation kind {kind!r}; expected one of {ELEVATION_KINDS}")


def invert_elevation(kind: str, phi: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """Inverse of :func:`convert_elevation`."""
    phi = np.asarray(phi, float)
    s = params.phi_scale
    if kind in ("depth_D", "height_h"):
        return phi / s + params.H0
    if kind == "geopotential_phiL":
        return params.g * (phi / s + params.H0)
    raise ValueError(f"unknown elevation kind {kind!r}; expected one of {ELEVATION_KINDS}")


def courant_numbers(fields: np.ndarray, params: PhysicalParams, grid: GridSpec, dt: float) -> Tuple[float, float]:
    """Advective ``max(|u| dt/dx + |v| dt/dy)`` and gravity-wave ``c dt / dx`` Courant numbers.

    ``fields`` are physical ``(u, v, ...)`` arrays of shape ``(>=2, ny, nx)``.
    """
    u, v = np.asarray(fields[0]), np.asarray(fields[1])
    cr_u = float(np.max(np.abs(u) * dt / grid.dx + np.abs(v) * dt / grid.dy))
    return cr_u, params.c * dt / grid.dx


def index_magnitude(grid: GridSpec) -> np.ndarray:
    """``sqrt(zx^2 + zy^2)`` on the FFT layout."""
    return np.sqrt(grid.zx.astype(float) ** 2 + grid.zy.astype(float) ** 2) * np.ones(grid.shape)


def fast_mode_energy(coeffs: np.ndarray, params: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """``|sigma^{-1}|^2 + |sigma^{+1}|^2`` per wavenumber."""
    sigma = project_modes(np.asarray(coeffs), eigenbasis(params, grid))
    return np.abs(sigma[0]) ** 2 + np.abs(sigma[2]) ** 2


def ring_energy(
    coeffs: np.ndarray,
    params: PhysicalParams,
    grid: GridSpec,
    K_center,
    half_width: float = 0.5,
) -> float:
    """Fraction of fast-mode energy with index magnitude ``K`` within ``half_width`` of a centre.

    ``K_center`` may be a sequence of centres; the annuli are then combined
    (a wave is counted once even if annuli overlap).  An empty fast spectrum
    gives 0.
    """
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    E = fast_mode_energy(coeffs, params, grid)
    total = float(E.sum())
    if total == 0:
        return 0.0
    K = index_magnitude(grid)
    centres = np.atleast_1d(np.asarray(K_center, float))
    inside = np.zeros(grid.shape, bool)
    for k0 in centres:
        inside |= np.abs(K - k0) <= half_width
    return float(E[inside].sum() / total)


class SamplingTooCoarseError(ValueError):
    pass


def normalized_correlation(
    profiles: np.ndarray, template: Optional[np.ndarray] = None, remove_mean: bool = False
) -> np.ndarray:
    """``<p, t> / (|p| |t|)`` of each profile with ``template`` (default: the first)."""
    P = np.asarray(profiles, float).reshape(len(profiles), -1)
    T = P[0] if template is None else np.asarray(template, float).ravel()
    if remove_mean:
        P = P - P.mean(axis=1, keepdims=True)
        T = T - T.mean()
    num = P @ T
    den = np.linalg.norm(P, axis=1) * np.linalg.norm(T)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1), 0.0)


def reformation_count(
    profiles: np.ndarray,
    template: Optional[np.ndarray] = None,
    threshold: float = 0.8,
    min_samples: int = 20,
    remove_mean: bool = False,
) -> int:
    """Number of interior local maxima of the normalised correlation above ``threshold``.

    ``profiles`` holds one field per sample time (e.g. ``phi`` of a 1D run).
    Peaks closer than ``min_samples`` samples to each other (or to ``t = 0``)
    mean the sampling cannot resolve the reformations.
    """
    c = normalized_correlation(profiles, template, remove_mean)
    if len(c) < 3:
        return 0
    interior = (c[1:-1] > c[:-2]) & (c[1:-1] >= c[2:]) & (c[1:-1] > threshold)
    peaks = np.nonzero(interior)[0] + 1
    if peaks.size:
        gaps = np.diff(np.concatenate([[0], peaks]))
        if gaps.min() < min_samples:
            raise SamplingTooCoarseError(
                f"reformations only {int(gaps.min())} samples apart; need at least {min_samples}")
    return int(peaks.size)


def phi_profiles(traj) -> np.ndarray:
    """Physical ``phi`` at every sample of a trajectory, shape ``(n_samples, ny, nx)``."""
    return np.stack([traj.physical(n)[2] for n in range(len(traj))])
