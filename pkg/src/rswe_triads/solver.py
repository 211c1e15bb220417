"""Pseudospectral integrator for the symmetrised f-plane RSWEs on a biperiodic grid.

The prognostic state is the array of Fourier-series coefficients of
``(u, v, phi)`` with shape ``(3, ny, nx)``.  The tendency is
``F(U) = -L U + N(U)``: ``L`` acts per wavenumber as a 3x3 matrix and ``N``
is the quadratic advection/flux term evaluated in physical space.

Functions of ``L`` (propagators, implicit solves, ETD weights) are formed
from the eigendecomposition ``L = R diag(i omega) R^H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np
import scipy.fft as sfft

from .spectral_core import GridSpec, PhysicalParams, eigenbasis, frequency_grid
from .stability import Scheme


class NumericalFailure(RuntimeError):
    """Base class for failures of a time integration."""

    def __init__(self, message: str, t: float = math.nan, scheme: str = ""):
        super().__init__(message)
        self.t = t
        self.scheme = scheme


class BlowUpError(NumericalFailure):
    pass


class NonConvergenceError(NumericalFailure):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Timestepping controls.  ``sample_interval`` defaults to ``dt``."""

    scheme: Scheme
    dt: float
    t_end: float
    mu: float = 0.0
    dealias: bool = False
    sample_interval: Optional[float] = None
    tol: float = 1e-12
    max_iter: int = 50
    nonlinear: bool = True
    blowup_factor: float = 1e6

    def __post_init__(self):
        if isinstance(self.scheme, str):
            object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        kind = self.scheme.kind
        if not (kind in ("ALPHA", "AB3", "TRBDF2", "ETD") or (kind == "RK" and self.scheme.param == 4)):
            raise ValueError(f"solver does not implement scheme {self.scheme}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.sample_interval is not None and self.sample_interval < self.dt * (1 - 1e-12):
            raise ValueError("sample_interval must be >= dt")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def sample_steps(self) -> np.ndarray:
        """Step indices at which snapshots are recorded (nearest step to ``n * dT``)."""
        dT = self.sample_interval or self.dt
        n_samples = int(math.floor(self.t_end / dT + 1e-9))
        steps = np.rint(np.arange(n_samples + 1) * dT / self.dt).astype(np.int64)
        return np.unique(np.minimum(steps, self.n_steps))


@dataclass
class Trajectory:
    """Snapshots ``coeffs[n]`` (shape ``(3, ny, nx)``) at times ``times[n]``."""

    times: np.ndarray
    coeffs: np.ndarray
    config: SolverConfig
    params: PhysicalParams
    grid: GridSpec
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def physical(self, n: int) -> np.ndarray:
        return sfft.ifft2(self.coeffs[n], norm="forward").real

    @property
    def final(self) -> np.ndarray:
        return self.coeffs[-1]


def linear_function(params: PhysicalParams, grid: GridSpec, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Per-wavenumber matrices ``R diag(fn(i omega)) R^H``, shape ``(ny, nx, 3, 3)``.

    ``fn`` receives the eigenvalues ``i omega`` of ``L`` with shape ``(ny, nx, 3)``.
    """
    R = eigenbasis(params, grid)
    psi = frequency_grid(params, grid)
    lam = 1j * psi[..., None] * np.array([-1.0, 0.0, 1.0])
    g = fn(lam)
    return np.einsum("yxim,yxm,yxjm->yxij", R, g, R.conj())


def linear_propagator(params: PhysicalParams, grid: GridSpec, dt: float) -> np.ndarray:
    """``exp(-dt L_k)`` for every wavenumber, shape ``(ny, nx, 3, 3)``."""
    return linear_function(params, grid, lambda lam: np.exp(-dt * lam))


def apply_matrices(M: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Apply per-wavenumber 3x3 matrices ``M`` (ny, nx, 3, 3) to ``U`` (3, ny, nx)."""
    return np.einsum("yxij,jyx->iyx", M, U)


def apply_hyperviscosity(U: np.ndarray, mu: float, dt: float, grid: GridSpec) -> np.ndarray:
    """Integrating-factor damping ``exp(-mu K^8 dt)`` of every coefficient."""
    if mu == 0:
        return U
    return U * np.exp(-mu * grid.K2**4 * dt)


def _phi_functions(z: np.ndarray):
    """``phi1(z) = (e^z - 1)/z`` and ``phi2(z) = (e^z - 1 - z)/z^2``.

    Taylor series near the origin avoid the cancellation in the closed forms.
    """
    z = np.asarray(z, complex)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0)
    zb = np.where(small, 1, z)
    ez = np.exp(zb)
    p1 = (ez - 1) / zb
    p2 = (ez - 1 - zb) / zb**2
    s1 = np.zeros_like(z)
    s2 = np.zeros_like(z)
    term = np.ones_like(z)
    for j in range(30):
        # term = z^j / j!
        s1 += term / (j + 1)
        s2 += term / ((j + 1) * (j + 2))
        term = term * zs / (j + 1)
    return np.where(small, s1, p1), np.where(small, s2, p2)


def half_to_full(H: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Expand a real-FFT half spectrum ``(..., ny, nx//2 + 1)`` to the full Hermitian array."""
    nx, ny = grid.nx, grid.ny
    nxh = nx // 2 + 1
    full = np.empty(H.shape[:-1] + (nx,), complex)
    full[..., :nxh] = H
    rows = (-np.arange(ny)) % ny
    cols = nx - np.arange(nxh, nx)
    full[..., nxh:] = np.conj(H[..., rows, :][..., cols])
    return full


def full_to_half(U: np.ndarray, grid: GridSpec) -> np.ndarray:
    return np.ascontiguousarray(U[..., : grid.nx // 2 + 1])


class RSWEModel:
    """Tendencies of the symmetrised RSWEs on one grid.

    Works on real-FFT half spectra of shape ``(3, ny, nx//2 + 1)``; the
    Nyquist row and column are always zero, as is everything outside the
    two-thirds box when dealiasing.
    """

    def __init__(self, params: PhysicalParams, grid: GridSpec, dealias: bool = False, nonlinear: bool = True):
        self.params = params
        self.grid = grid
        self.dealias = dealias
        self.nonlinear = nonlinear
        nxh = grid.nx // 2 + 1
        self.nxh = nxh
        self.ikx = np.ascontiguousarray((1j * grid.kx)[:, :nxh])
        self.iky = 1j * grid.ky
        mask = grid.nyquist_mask()
        if dealias:
            mask &= grid.dealias_mask()
        self.full_mask = mask
        self.mask = np.ascontiguousarray(mask[:, :nxh]).astype(float)
        self.f = params.f
        self.icx = params.c * self.ikx
        self.icy = params.c * self.iky
        self._spec = np.empty((7, grid.ny, nxh), complex)
        self._prod = np.empty((4,) + grid.shape)

    def linear(self, U: np.ndarray) -> np.ndarray:
        """``-L U``."""
        u, v, p = U
        out = np.empty_like(U)
        out[0] = self.f * v - self.icx * p
        out[1] = -self.f * u - self.icy * p
        out[2] = -(self.icx * u + self.icy * v)
        return out

    def nonlinear_term(self, U: np.ndarray) -> np.ndarray:
        """``N(U) = -[(u.grad)u, (u.grad)v, div(phi u)]`` in spectral space."""
        if not self.nonlinear:
            return np.zeros_like(U)
        spec = self._spec
        if self.dealias:
            np.multiply(U, self.mask, out=spec[:3])
        else:
            spec[:3] = U
        np.multiply(self.ikx, spec[0], out=spec[3])
        np.multiply(self.iky, spec[0], out=spec[4])
        np.multiply(self.ikx, spec[1], out=spec[5])
        np.multiply(self.iky, spec[1], out=spec[6])
        uu, vv, pp, ux, uy, vx, vy = sfft.irfft2(spec, s=self.grid.shape, norm="forward")
        prod = self._prod
        prod[0] = uu * ux + vv * uy
        prod[1] = uu * vx + vv * vy
        np.multiply(pp, uu, out=prod[2])
        np.multiply(pp, vv, out=prod[3])
        P = sfft.rfft2(prod, norm="forward")
        N = np.empty_like(U)
        np.multiply(P[0], -self.mask, out=N[0])
        np.multiply(P[1], -self.mask, out=N[1])
        N[2] = -(self.ikx * P[2] + self.iky * P[3]) * self.mask
        return N

    def rhs(self, U: np.ndarray) -> np.ndarray:
        if self.nonlinear:
            return self.linear(U) + self.nonlinear_term(U)
        return self.linear(U)


def nonlinear_rhs(coeffs: np.ndarray, params: PhysicalParams, grid: GridSpec, dealias: bool = False) -> np.ndarray:
    """Spectral nonlinear tendency (full Fourier layout) of a state; linear terms excluded."""
    model = RSWEModel(params, grid, dealias)
    return half_to_full(model.nonlinear_term(full_to_half(np.asarray(coeffs, complex), grid)), grid)


class Stepper:
    """Advances a half-spectrum state by one step of the configured scheme.

    Holds the precomputed per-wavenumber matrices and, for AB3, the history
    of past tendencies.  The first two AB3 steps are taken with RK4.
    """

    def __init__(self, config: SolverConfig, params: PhysicalParams, grid: GridSpec):
        self.config = config
        self.params = params
        self.grid = grid
        self.model = RSWEModel(params, grid, config.dealias, config.nonlinear)
        self.mask = self.model.mask
        nxh = self.model.nxh
        self.damp = None
        if config.mu > 0:
            self.damp = np.exp(-config.mu * grid.K2[:, :nxh] ** 4 * config.dt)
        s = config.scheme
        dt = config.dt
        self.history: List[np.ndarray] = []
        self.t = 0.0

        def lf(fn):
            return np.ascontiguousarray(linear_function(params, grid, fn)[:, :nxh])

        if s.kind == "ALPHA" and s.param > 0:
            a = s.param
            self.solve = lf(lambda lam: 1 / (1 + a * dt * lam))
        elif s.kind == "TRBDF2":
            self.solve_tr = lf(lambda lam: 1 / (1 + dt / 4 * lam))
            self.solve_bdf = lf(lambda lam: 1 / (1 + dt / 3 * lam))
        elif s.kind == "ETD":
            self.expL = lf(lambda lam: np.exp(-dt * lam))
            self.phi1 = lf(lambda lam: _phi_functions(-dt * lam)[0])
            self.phi2 = lf(lambda lam: _phi_functions(-dt * lam)[1])

    # --- schemes -------------------------------------------------------------

    def _rk4(self, U, F0=None):
        dt, F = self.config.dt, self.model.rhs
        k1 = F(U) if F0 is None else F0
        k2 = F(U + 0.5 * dt * k1)
        k3 = F(U + 0.5 * dt * k2)
        k4 = F(U + dt * k3)
        return U + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    def _picard(self, M, base, coef, guess):
        """Solve ``(I + coef L) X = base + coef N(X)`` by fixed-point iteration."""
        cfg = self.config
        N = self.model.nonlinear_term
        X = apply_matrices(M, base + coef * N(guess))
        if not cfg.nonlinear:
            return X
        for _ in range(cfg.max_iter):
            Xn = apply_matrices(M, base + coef * N(X))
            diff = np.max(np.abs(Xn - X))
            scale = np.max(np.abs(Xn))
            X = Xn
            if not np.isfinite(diff):
                raise BlowUpError(f"{cfg.scheme.name} implicit iteration diverged at t={self.t:.6g}", self.t, cfg.scheme.name)
            if diff <= cfg.tol * max(scale, 1e-300):
                return X
        raise NonConvergenceError(
            f"{cfg.scheme.name} implicit iteration did not reach tol={cfg.tol} in {cfg.max_iter} iterations "
            f"at t={self.t:.6g} (last relative change {diff / max(scale, 1e-300):.3e})", self.t, cfg.scheme.name)

    def _alpha(self, U):
        a, dt = self.config.scheme.param, self.config.dt
        if a == 0:
            return U + dt * self.model.rhs(U)
        base = U + (1 - a) * dt * self.model.rhs(U) if a < 1 else U
        return self._picard(self.solve, base, a * dt, U)

    def _trbdf2(self, U):
        dt = self.config.dt
        base = U + dt / 4 * self.model.rhs(U)
        Us = self._picard(self.solve_tr, base, dt / 4, U)
        return self._picard(self.solve_bdf, (4 * Us - U) / 3, dt / 3, Us)

    def _ab3(self, U):
        dt, F = self.config.dt, self.model.rhs
        Fn = F(U)
        self.history.append(Fn)
        if len(self.history) < 3:
            return self._rk4(U, Fn)
        f2, f1, f0 = self.history[-3:]
        self.history = self.history[-2:]
        return U + dt / 12 * (23 * f0 - 16 * f1 + 5 * f2)

    def _etd(self, U):
        dt = self.config.dt
        N = self.model.nonlinear_term
        EU = apply_matrices(self.expL, U)
        if not self.config.nonlinear:
            return EU
        N0 = N(U)
        a = EU + dt * apply_matrices(self.phi1, N0)
        return a + dt * apply_matrices(self.phi2, N(a) - N0)

    def step(self, U: np.ndarray) -> np.ndarray:
        kind = self.config.scheme.kind
        if kind == "RK":
            Un = self._rk4(U)
        elif kind == "ALPHA":
            Un = self._alpha(U)
        elif kind == "TRBDF2":
            Un = self._trbdf2(U)
        elif kind == "AB3":
            Un = self._ab3(U)
        else:
            Un = self._etd(U)
        Un *= self.mask
        if self.damp is not None:
            Un *= self.damp
        self.t += self.config.dt
        return Un


def step(coeffs: np.ndarray, config: SolverConfig, params: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """One step of a full-layout state from a fresh stepper (AB3 takes its RK4 startup step)."""
    st = Stepper(config, params, grid)
    U = full_to_half(np.asarray(coeffs, complex), grid) * st.mask
    return half_to_full(st.step(U), grid)


def integrate(
    initial: np.ndarray,
    config: SolverConfig,
    params: PhysicalParams,
    grid: GridSpec,
    progress: Optional[Callable[[float], None]] = None,
) -> Trajectory:
    """Step from ``t = 0`` to ``config.t_end`` recording snapshots every ``sample_interval``.

    ``initial`` holds spectral coefficients of ``(u, v, phi)`` in the full
    Fourier layout.  Coefficients on the Nyquist row and column (and outside
    the two-thirds box when dealiasing) are removed from the initial state.
    """
    U0 = np.asarray(initial, complex)
    if U0.shape != (3,) + grid.shape:
        raise ValueError(f"initial state shape {U0.shape} does not match grid {(3,) + grid.shape}")
    stepper = Stepper(config, params, grid)
    U = full_to_half(U0, grid) * stepper.mask
    samples = config.sample_steps()
    out = np.empty((len(samples),) + U0.shape, complex)
    limit = config.blowup_factor * max(np.max(np.abs(U)), 1e-300)
    j = 0
    if samples[0] == 0:
        out[0] = half_to_full(U, grid)
        j = 1
    name = config.scheme.name
    for n in range(1, config.n_steps + 1):
        U = stepper.step(U)
        m = np.max(np.abs(U))
        if not (m <= limit):
            t = n * config.dt
            raise BlowUpError(f"{name} blew up at t={t:.6g} (max coefficient {m:.3e})", t, name)
        if j < len(samples) and samples[j] == n:
            out[j] = half_to_full(U, grid)
            j += 1
            if progress is not None:
                progress(n * config.dt)
    return Trajectory(samples * config.dt, out, config, params, grid)


def integrate_1d(
    initial_fields: np.ndarray,
    config: SolverConfig,
    params: PhysicalParams,
    grid: GridSpec,
    nonlinear: bool = True,
) -> Trajectory:
    """Integrate a 1D profile (no y dependence).  ``initial_fields`` is ``(3, nx)`` or ``(3, 1, nx)``."""
    if grid.ny != 1:
        raise ValueError("integrate_1d needs a line grid (ny = 1)")
    fields = np.asarray(initial_fields, float).reshape((3,) + grid.shape)
    cfg = replace(config, nonlinear=nonlinear)
    return integrate(sfft.fft2(fields, norm="forward"), cfg, params, grid)
