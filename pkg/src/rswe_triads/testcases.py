"""Initial conditions and canonical parameter sets for the Gaussian and triadic test cases."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .solver import SolverConfig
from .spectral_core import GridSpec, OutOfGridError, PhysicalParams, WaveIndex, physical_eigenmode, to_spectral
from .stability import Scheme

CASE_IDS = ("case1_ps", "case1_fe", "case2a", "case2b")

# f = 10 1/s, g = 50 m/s^2, H0 = 2 m gives Ro = Fr = 0.1 for unit scales
CASE_PARAMS = PhysicalParams(f=10.0, g=50.0, H0=2.0)


@dataclass(frozen=True)
class GaussianSpec:
    """Height bump ``H_G + eta_G exp(-((x - L/2)^2 + (y - L/2)^2) / sigma_r)``."""

    eta_G: float
    H_G: float
    sigma_r: float

    def __post_init__(self):
        if self.H_G <= 0 or self.sigma_r <= 0:
            raise ValueError("H_G and sigma_r must be positive")


@dataclass(frozen=True)
class WaveInitSpec:
    """Initial waves as ``(zx, zy, alpha, sigma0)`` tuples with real amplitudes."""

    waves: Tuple[Tuple[int, int, int, float], ...] = ()

    def __post_init__(self):
        clean = []
        for w in self.waves:
            zx, zy, alpha, amp = w
            if alpha not in (-1, 0, 1):
                raise ValueError(f"mode branch must be -1, 0 or +1, got {alpha}")
            if isinstance(amp, complex):
                raise ValueError("initial amplitudes must be real")
            clean.append((int(zx), int(zy), int(alpha), float(amp)))
        object.__setattr__(self, "waves", tuple(clean))

    def __len__(self):
        return len(self.waves)


def gaussian_ic(spec: GaussianSpec, params: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """Fields ``(u, v, h)`` of the centred Gaussian height bump at rest, shape ``(3, ny, nx)``."""
    x, y = grid.coords()
    r2 = (x - grid.lx / 2) ** 2 + (y - grid.ly / 2) ** 2
    h = spec.H_G + spec.eta_G * np.exp(-r2 / spec.sigma_r)
    zero = np.zeros_like(h)
    return np.stack([zero, zero.copy(), h])


def gaussian_1d_ic(grid: GridSpec) -> np.ndarray:
    """Rest state with ``phi = exp(-(x - pi)^2 / 2)`` on ``[0, 2 pi)``, shape ``(3, 1, nx)``."""
    if grid.ny != 1:
        raise ValueError("gaussian_1d_ic needs a line grid")
    if not math.isclose(grid.lx, 2 * math.pi):
        raise ValueError("the 1D Gaussian profile is defined on [0, 2 pi)")
    x, _ = grid.coords()
    phi = np.exp(-((x - math.pi) ** 2) / 2)
    zero = np.zeros_like(phi)
    return np.stack([zero, zero.copy(), phi])


def height_to_phi(fields: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """Replace the height component of ``(u, v, h)`` by ``phi = sqrt(g/H0) (h - H0)``."""
    out = np.array(fields, float)
    out[2] = params.phi_scale * (out[2] - params.H0)
    return out


def phi_to_height(fields: np.ndarray, params: PhysicalParams) -> np.ndarray:
    out = np.array(fields, float)
    out[2] = params.H0 + out[2] / params.phi_scale
    return out


def triadic_ic(spec: WaveInitSpec, params: PhysicalParams, grid: GridSpec, scale: float = 1.0) -> np.ndarray:
    """Superposition ``scale * sum sigma0 m`` of physical eigenmodes; fields ``(u, v, phi)``.

    Each ``m = Re{exp(i(kx + ly)) r}`` projects onto the wave and its Hermitian
    mirror with weight ``sigma0 / 2`` each, so ``scale = 2`` makes the projected
    amplitude at the listed wave equal ``sigma0``.
    """
    U = np.zeros((3,) + grid.shape)
    for zx, zy, alpha, amp in spec.waves:
        if not grid.resolvable(zx, zy) or not grid.nyquist_mask()[grid.fft_index(zx, zy)]:
            raise OutOfGridError(f"wave ({zx}, {zy}) is not resolvable away from Nyquist")
        U += scale * amp * physical_eigenmode(params, WaveIndex(zx, zy, alpha), grid)
    return U


@dataclass(frozen=True)
class CaseDefinition:
    """Everything needed to reproduce one canonical run."""

    case_id: str
    params: PhysicalParams
    grid: GridSpec
    t_end: float
    sample_interval: float
    mu: float
    dealias: bool
    gaussian: Optional[GaussianSpec] = None
    waves: Optional[WaveInitSpec] = None
    amplitude_scale: float = 1.0
    reference_dt: float = 1e-4
    extra: dict = field(default_factory=dict, compare=False)

    def initial_fields(self) -> np.ndarray:
        """Physical ``(u, v, phi)`` at ``t = 0``."""
        if self.gaussian is not None:
            return height_to_phi(gaussian_ic(self.gaussian, self.params, self.grid), self.params)
        if self.waves is not None:
            return triadic_ic(self.waves, self.params, self.grid, self.amplitude_scale)
        return np.zeros((3,) + self.grid.shape)

    def initial_state(self) -> np.ndarray:
        """Spectral coefficients of the initial fields."""
        return to_spectral(self.initial_fields())

    def solver_config(self, scheme="RK4", dt: Optional[float] = None, t_end: Optional[float] = None, **kw) -> SolverConfig:
        if isinstance(scheme, str):
            scheme = Scheme.parse(scheme)
        return SolverConfig(
            scheme=scheme,
            dt=self.reference_dt if dt is None else dt,
            t_end=self.t_end if t_end is None else t_end,
            mu=self.mu,
            dealias=self.dealias,
            sample_interval=self.sample_interval,
            **kw,
        )


# Triadic waves are built as U = sigma0 m, so each listed wave and its mirror carry sigma0 / 2.
TRIADIC_AMPLITUDE_SCALE = 1.0


def canonical_case(case_id: str) -> CaseDefinition:
    """Parameter sets of the Gaussian (case 1) and triadic (cases 2a, 2b) tests."""
    p = CASE_PARAMS
    if case_id == "case1_ps":
        return CaseDefinition(case_id, p, GridSpec.square(32, 2 * math.pi), t_end=100.0, sample_interval=0.05,
                              mu=4e-12, dealias=False, gaussian=GaussianSpec(eta_G=1.0, H_G=2.0, sigma_r=0.656))
    if case_id == "case1_fe":
        return CaseDefinition(case_id, p, GridSpec.square(32, 10.0), t_end=50.0, sample_interval=0.05,
                              mu=0.0, dealias=False, gaussian=GaussianSpec(eta_G=0.1, H_G=2.0, sigma_r=1.66))
    if case_id in ("case2a", "case2b"):
        amp = 0.1
        waves = [(5, 0, 1, amp)]
        if case_id == "case2a":
            waves.append((-5, 5, 0, amp))
        else:
            waves.append((-3, 4, 1, amp))
            waves += [(k, l, 0, amp) for k in (-1, 0, 1) for l in (-1, 0, 1)]
        return CaseDefinition(case_id, p, GridSpec.square(64, 2 * math.pi), t_end=50.0, sample_interval=0.1,
                              mu=1e-10, dealias=True, waves=WaveInitSpec(tuple(waves)),
                              amplitude_scale=TRIADIC_AMPLITUDE_SCALE)
    raise ValueError(f"unknown case id {case_id!r}; expected one of {CASE_IDS}")


def characteristic_velocities(traj) -> Tuple[float, float]:
    """Two readings of the characteristic speed of a trajectory.

    Returns the time mean of the grid RMS of ``|u|`` and the time mean of the
    grid maximum of ``|u|``.
    """
    rms, mx = [], []
    for n in range(len(traj)):
        u, v, _ = traj.physical(n)
        speed = np.sqrt(u * u + v * v)
        rms.append(np.sqrt(np.mean(speed**2)))
        mx.append(speed.max())
    return float(np.mean(rms)), float(np.mean(mx))
