"""Physical parameters, dispersion relation and eigenbasis of the f-plane RSWEs.

The symmetrised variables are ``U = (u, v, phi)`` with ``phi = sqrt(g/H0) * eta``.
In Fourier space the linear operator for wavevector ``(k, l)`` is

    L_k = [[0,     -f,    i c k],
           [f,      0,    i c l],
           [i c k,  i c l,    0]]

and the system reads ``dU/dt + L_k U = N_k(U)``.  Its eigenvectors satisfy
``L_k r = i omega r`` with ``omega = alpha * sqrt(f**2 + c**2 K**2)``.

Spectral coefficients are Fourier-series coefficients,
``Uhat = fft2(U) / (nx * ny)``, stored with axes ``(component, y, x)``.
Mode axes are always ordered ``alpha = -1, 0, +1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, NamedTuple, Tuple

import numpy as np

ALPHAS = (-1, 0, 1)


class OutOfGridError(ValueError):
    """A wavevector that cannot be represented on the grid."""


class AliasingError(ValueError):
    """An interaction whose output wavenumber would alias on the working grid."""


@dataclass(frozen=True)
class PhysicalParams:
    """Rotation rate ``f`` (1/s), gravity ``g`` (m/s^2) and mean depth ``H0`` (m)."""

    f: float
    g: float
    H0: float

    def __post_init__(self):
        if self.f < 0:
            raise ValueError(f"f must be >= 0, got {self.f}")
        if self.g <= 0 or self.H0 <= 0:
            raise ValueError(f"g and H0 must be positive, got g={self.g}, H0={self.H0}")

    @property
    def c(self) -> float:
        return math.sqrt(self.g * self.H0)

    @property
    def phi_scale(self) -> float:
        """Factor ``sqrt(g/H0)`` converting a height perturbation to ``phi``."""
        return math.sqrt(self.g / self.H0)

    @classmethod
    def nondimensional(cls, epsilon: float) -> "PhysicalParams":
        """Standard form with ``Ro = Fr = epsilon``: ``f = c = 1/epsilon``.

        ``g = H0 = 1/epsilon`` so that ``phi`` and ``eta`` coincide.
        """
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        return cls(f=1.0 / epsilon, g=1.0 / epsilon, H0=1.0 / epsilon)


@dataclass(frozen=True)
class NondimParams:
    """Characteristic scales and the Rossby/Froude numbers they imply."""

    U: float
    L_char: float
    T_char: float
    Ro: float
    Fr: float
    epsilon: float | None = None

    @classmethod
    def from_scales(cls, params: PhysicalParams, U: float, L_char: float) -> "NondimParams":
        Ro = U / (params.f * L_char) if params.f > 0 else math.inf
        Fr = U / params.c
        eps = Ro if math.isclose(Ro, Fr, rel_tol=1e-12) else None
        return cls(U=U, L_char=L_char, T_char=L_char / U, Ro=Ro, Fr=Fr, epsilon=eps)


@dataclass(frozen=True)
class GridSpec:
    """Biperiodic grid ``[0, lx) x [0, ly)`` with ``nx * ny`` points.

    Integer wavenumber indices follow the FFT convention ``z in [-n/2, n/2 - 1]``;
    the physical wavenumber is ``k = 2 pi z / lx``.  A 1D line grid has ``ny = 1``.
    """

    nx: int
    ny: int
    lx: float = 2 * math.pi
    ly: float = 2 * math.pi

    def __post_init__(self):
        if self.nx < 4 or self.nx % 2:
            raise ValueError(f"nx must be even and >= 4, got {self.nx}")
        if self.ny != 1 and (self.ny < 4 or self.ny % 2):
            raise ValueError(f"ny must be even and >= 4 (or 1 for a line), got {self.ny}")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("domain lengths must be positive")

    @classmethod
    def square(cls, n: int, length: float = 2 * math.pi) -> "GridSpec":
        return cls(n, n, length, length)

    @classmethod
    def line(cls, nx: int, lx: float = 2 * math.pi) -> "GridSpec":
        return cls(nx, 1, lx, 1.0)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    def index_range(self, axis: str = "x") -> range:
        n = self.nx if axis == "x" else self.ny
        if n == 1:
            return range(0, 1)
        return range(-n // 2, n // 2)

    def resolvable(self, zx: int, zy: int) -> bool:
        return zx in self.index_range("x") and zy in self.index_range("y")

    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        """Physical coordinates ``x_j = j lx / nx`` as 2D arrays of shape ``(ny, nx)``."""
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y, indexing="xy")

    def _z(self):
        zx = np.rint(np.fft.fftfreq(self.nx, 1.0 / self.nx)).astype(int)
        zy = np.rint(np.fft.fftfreq(self.ny, 1.0 / self.ny)).astype(int) if self.ny > 1 else np.zeros(1, int)
        return zx, zy

    @property
    def zx(self) -> np.ndarray:
        """Integer x-index per column of an FFT array, shape ``(1, nx)``."""
        return self._z()[0][None, :]

    @property
    def zy(self) -> np.ndarray:
        """Integer y-index per row of an FFT array, shape ``(ny, 1)``."""
        return self._z()[1][:, None]

    @property
    def kx(self) -> np.ndarray:
        return 2 * np.pi * self.zx / self.lx

    @property
    def ky(self) -> np.ndarray:
        return 2 * np.pi * self.zy / self.ly

    @property
    def K2(self) -> np.ndarray:
        return self.kx**2 + self.ky**2

    def nyquist_mask(self) -> np.ndarray:
        """False on the Nyquist row/column, whose Hermitian mirror is ill-defined."""
        m = np.ones(self.shape, bool)
        m[:, self.nx // 2] = False
        if self.ny > 1:
            m[self.ny // 2, :] = False
        return m

    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule: keep ``|zx| <= nx/3`` and ``|zy| <= ny/3``."""
        keep = (np.abs(self.zx) <= self.nx / 3) & (np.abs(self.zy) <= max(self.ny, 3) / 3)
        return np.broadcast_to(keep, self.shape).copy()

    def fft_index(self, zx: int, zy: int) -> Tuple[int, int]:
        """Array position ``(row, col)`` of the coefficient with indices ``(zx, zy)``."""
        if not self.resolvable(zx, zy):
            raise OutOfGridError(f"wavenumber ({zx}, {zy}) is not resolvable on {self.nx}x{self.ny}")
        return (zy % self.ny, zx % self.nx)


class WaveIndex(NamedTuple):
    """Address of one linear wave: integer wavenumber indices and mode branch."""

    zx: int
    zy: int
    alpha: int

    def mirror(self) -> "WaveIndex":
        return WaveIndex(-self.zx, -self.zy, -self.alpha)

    def wavenumber(self, grid: GridSpec) -> Tuple[float, float]:
        return 2 * math.pi * self.zx / grid.lx, 2 * math.pi * self.zy / grid.ly


def _check_alpha(alpha):
    if alpha not in ALPHAS:
        raise ValueError(f"mode branch must be -1, 0 or +1, got {alpha}")


def dispersion(params: PhysicalParams, wave: WaveIndex, grid: GridSpec) -> float:
    """Linear frequency ``alpha * sqrt(f^2 + c^2 K^2)`` of one wave."""
    _check_alpha(wave.alpha)
    if wave.alpha == 0:
        return 0.0
    k, l = wave.wavenumber(grid)
    return wave.alpha * math.sqrt(params.f**2 + params.c**2 * (k * k + l * l))


def frequency_grid(params: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """Positive-branch frequency ``psi = sqrt(f^2 + c^2 K^2)`` on the FFT layout."""
    return np.sqrt(params.f**2 + params.c**2 * grid.K2)


def _eigvecs(f, c, k, l):
    """Eigenvector arrays for broadcastable wavenumbers; returns shape ``(..., 3, 3)``.

    The last axis indexes the mode (alpha = -1, 0, +1), the one before it the
    component (u, v, phi).
    """
    k = np.asarray(k, float)
    l = np.asarray(l, float)
    k, l = np.broadcast_arrays(k, l)
    K2 = k * k + l * l
    K = np.sqrt(K2)
    psi = np.sqrt(f * f + c * c * K2)
    zero = K == 0
    Ks = np.where(zero, 1.0, K)
    ps = np.where(psi == 0, 1.0, psi)
    norm = 1.0 / (np.sqrt(2.0) * Ks * ps)

    R = np.empty(k.shape + (3, 3), complex)
    # alpha = -1
    R[..., 0, 0] = norm * (-k * psi + 1j * f * l)
    R[..., 1, 0] = norm * (-l * psi - 1j * f * k)
    R[..., 2, 0] = norm * (c * K2)
    # alpha = +1
    R[..., 0, 2] = norm * (k * psi + 1j * f * l)
    R[..., 1, 2] = norm * (l * psi - 1j * f * k)
    R[..., 2, 2] = norm * (c * K2)
    # alpha = 0
    R[..., 0, 1] = -1j * c * l / ps
    R[..., 1, 1] = 1j * c * k / ps
    R[..., 2, 1] = f / ps

    s = 1 / np.sqrt(2.0)
    R[zero] = np.array([[-1j * s, 0, 1j * s], [s, 0, s], [0, 1, 0]], complex)
    return R


def eigenvector(params: PhysicalParams, wave: WaveIndex, grid: GridSpec) -> np.ndarray:
    """Unit eigenvector ``(ru, rv, rphi)`` of mode ``wave.alpha`` at ``wave``'s wavevector."""
    _check_alpha(wave.alpha)
    k, l = wave.wavenumber(grid)
    return _eigvecs(params.f, params.c, k, l)[:, wave.alpha + 1].copy()


def eigenbasis(params: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """Eigenvectors for every FFT coefficient, shape ``(ny, nx, 3, 3)`` (component, mode)."""
    kx, ky = np.broadcast_arrays(grid.kx, grid.ky)
    return _eigvecs(params.f, params.c, kx, ky)


def linear_operator(params: PhysicalParams, grid: GridSpec) -> np.ndarray:
    """The 3x3 matrices ``L_k`` for every FFT coefficient, shape ``(ny, nx, 3, 3)``."""
    kx, ky = np.broadcast_arrays(grid.kx, grid.ky)
    c, f = params.c, params.f
    L = np.zeros(kx.shape + (3, 3), complex)
    L[..., 0, 1] = -f
    L[..., 1, 0] = f
    L[..., 0, 2] = 1j * c * kx
    L[..., 1, 2] = 1j * c * ky
    L[..., 2, 0] = 1j * c * kx
    L[..., 2, 1] = 1j * c * ky
    return L


def physical_eigenmode(params: PhysicalParams, wave: WaveIndex, grid: GridSpec) -> np.ndarray:
    """Real fields ``Re{exp(i(kx + ly)) r}`` sampled on the grid, shape ``(3, ny, nx)``."""
    if not grid.resolvable(wave.zx, wave.zy):
        raise OutOfGridError(f"wave {wave} is not resolvable on a {grid.nx}x{grid.ny} grid")
    _check_alpha(wave.alpha)
    k, l = wave.wavenumber(grid)
    x, y = grid.coords()
    theta = k * x + l * y
    cos, sin = np.cos(theta), np.sin(theta)
    f, c = params.f, params.c
    K2 = k * k + l * l
    if K2 == 0:
        r = eigenvector(params, wave, grid)
        return np.stack([r[i].real * cos - r[i].imag * sin for i in range(3)])
    K = math.sqrt(K2)
    psi = math.sqrt(f * f + c * c * K2)
    if wave.alpha == 0:
        return np.stack([l * c * sin, -k * c * sin, f * cos]) / psi
    s = wave.alpha
    norm = 1.0 / (math.sqrt(2) * K * psi)
    return norm * np.stack(
        [
            s * k * psi * cos - l * f * sin,
            s * l * psi * cos + k * f * sin,
            c * K2 * cos,
        ]
    )


def to_spectral(fields: np.ndarray) -> np.ndarray:
    """Fourier-series coefficients of real fields with shape ``(..., ny, nx)``."""
    return np.fft.fft2(fields, norm="forward")


def to_physical(coeffs: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(coeffs, norm="forward").real


def project_modes(coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Mode amplitudes ``sigma = conj(r) . Uhat``; returns shape ``(3, ny, nx)`` over alpha."""
    return np.einsum("yxim,iyx->myx", basis.conj(), coeffs)


def reconstruct_modes(sigma: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Inverse of :func:`project_modes`: ``Uhat = sum_alpha sigma r``."""
    return np.einsum("yxim,myx->iyx", basis, sigma)


@dataclass
class SpectralAmplitudes:
    """Mode amplitudes on a grid, addressable by :class:`WaveIndex`."""

    sigma: np.ndarray  # (3, ny, nx), mode axis alpha = -1, 0, +1
    grid: GridSpec = field(repr=False)

    def __getitem__(self, wave: WaveIndex) -> complex:
        row, col = self.grid.fft_index(wave.zx, wave.zy)
        return complex(self.sigma[wave.alpha + 1, row, col])

    def items(self) -> Iterator[Tuple[WaveIndex, complex]]:
        zx = np.broadcast_to(self.grid.zx, self.grid.shape)
        zy = np.broadcast_to(self.grid.zy, self.grid.shape)
        for m, alpha in enumerate(ALPHAS):
            for (row, col), val in np.ndenumerate(self.sigma[m]):
                yield WaveIndex(int(zx[row, col]), int(zy[row, col]), alpha), complex(val)

    def as_dict(self, tol: float = 0.0) -> Dict[WaveIndex, complex]:
        return {w: s for w, s in self.items() if abs(s) > tol}

    def energy(self) -> np.ndarray:
        return np.abs(self.sigma) ** 2


def project_spectral_amplitudes(coeffs: np.ndarray, params: PhysicalParams, grid: GridSpec) -> SpectralAmplitudes:
    """Project spectral coefficients of ``(u, v, phi)`` onto the eigenbasis."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (3,) + grid.shape:
        raise ValueError(f"state shape {coeffs.shape} does not match grid {(3,) + grid.shape}")
    return SpectralAmplitudes(project_modes(coeffs, eigenbasis(params, grid)), grid)


# --- interaction coefficients -------------------------------------------------


def bilinear_nonlinearity(A: np.ndarray, B: np.ndarray, kx: np.ndarray, ky: np.ndarray) -> np.ndarray:
    """Symmetrised quadratic term ``N(A, B)`` for complex fields on a periodic grid.

    ``N(U, U) = -[(u.grad)u, (u.grad)v, div(phi u)]``; the symmetrisation is
    ``(Ntilde(A, B) + Ntilde(B, A)) / 2``.  Inputs have shape ``(3, ny, nx)``.
    """

    def d(field, kk):
        return np.fft.ifft2(1j * kk * np.fft.fft2(field))

    def half(P, Q):
        up, vp = P[0], P[1]
        adv_u = up * d(Q[0], kx) + vp * d(Q[0], ky)
        adv_v = up * d(Q[1], kx) + vp * d(Q[1], ky)
        flux = d(Q[2] * up, kx) + d(Q[2] * vp, ky)
        return -np.stack([adv_u, adv_v, flux])

    return 0.5 * (half(A, B) + half(B, A))


def interaction_coefficient(
    params: PhysicalParams,
    grid: GridSpec,
    wave_a: WaveIndex,
    wave_b: WaveIndex,
    wave_out: WaveIndex,
    refine: int = 2,
) -> Tuple[complex, bool]:
    """Interaction coefficient ``<N(e_a r_a, e_b r_b), e_k r_k>`` by pseudospectral projection.

    The product is evaluated on a working grid ``refine`` times finer than
    ``grid`` so that the output wavenumber never aliases.  Returns the
    coefficient and a flag that is False when the triadic constraint fails
    (the coefficient is then 0).
    """
    for w in (wave_a, wave_b, wave_out):
        if not grid.resolvable(w.zx, w.zy):
            raise OutOfGridError(f"wave {w} is not resolvable")
    if (wave_a.zx + wave_b.zx, wave_a.zy + wave_b.zy) != (wave_out.zx, wave_out.zy):
        return 0j, False
    line = grid.ny == 1
    work = GridSpec(grid.nx * refine, 1 if line else grid.ny * refine, grid.lx, grid.ly)
    if not work.resolvable(wave_out.zx, wave_out.zy) or (
        abs(wave_out.zx) >= work.nx // 2 or (not line and abs(wave_out.zy) >= work.ny // 2)
    ):
        raise AliasingError(f"output wave {wave_out} aliases on the {work.nx}x{work.ny} working grid")

    x, y = work.coords()

    def mode(w):
        k, l = w.wavenumber(work)
        r = eigenvector(params, w, work)
        return np.exp(1j * (k * x + l * y))[None] * r[:, None, None]

    prod = bilinear_nonlinearity(mode(wave_a), mode(wave_b), work.kx, work.ky)
    row, col = work.fft_index(wave_out.zx, wave_out.zy)
    coeff = np.fft.fft2(prod, norm="forward")[:, row, col]
    r_out = eigenvector(params, wave_out, work)
    return complex(np.vdot(r_out, coeff)), True
