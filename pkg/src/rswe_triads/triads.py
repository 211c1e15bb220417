"""Enumeration and classification of triadic interactions on a discrete grid.

A triad couples two incoming waves ``a`` and ``b`` with an outgoing wave whose
wavevector is ``k_a + k_b``.  Its frequency is ``Omega = w_a + w_b - w_out``.
Triad sets are stored column-wise (numpy arrays) because a 32x32 grid already
holds several million triads.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .spectral_core import GridSpec, OutOfGridError, PhysicalParams, WaveIndex, dispersion

INTERACTION_TYPES = ("i", "ii-a", "ii-b", "iii-a", "iii-b", "iv-a", "iv-b", "v-a", "v-b", "vi")

ACRONYMS = {
    "i": "SSS", "ii-a": "FSF", "ii-b": "FSF", "iii-a": "FFF", "iii-b": "FFF",
    "iv-a": "SFS", "iv-b": "SFS", "v-a": "-", "v-b": "-", "vi": "-",
}


def _classify_modes(aa: int, ab: int, ao: int) -> str:
    slow = (aa == 0) + (ab == 0) + (ao == 0)
    if slow == 3:
        return "i"
    if slow == 2:
        return "iv-a" if ao != 0 else "iv-b"
    if slow == 1:
        if ao == 0:
            return "ii-a" if aa == -ab else "v-a"
        fast_in = aa if aa != 0 else ab
        return "ii-b" if fast_in == ao else "v-b"
    if aa == ab:
        return "iii-a" if ao == aa else "vi"
    return "iii-b"


# lookup over the 27 mode permutations, code = 9(aa+1) + 3(ab+1) + (ao+1)
_MODE_PERMS = [(a, b, o) for a in (-1, 0, 1) for b in (-1, 0, 1) for o in (-1, 0, 1)]
_TYPE_CODE = np.array([INTERACTION_TYPES.index(_classify_modes(*p)) for p in _MODE_PERMS], np.int8)

PERMUTATION_COUNTS = {t: sum(_classify_modes(*p) == t for p in _MODE_PERMS) for t in INTERACTION_TYPES}


def mode_permutations(interaction_type: str) -> list:
    """The ``(alpha_a, alpha_b, alpha_out)`` permutations belonging to one type."""
    _check_type(interaction_type)
    return [p for p in _MODE_PERMS if _classify_modes(*p) == interaction_type]


def _check_type(t):
    if t not in INTERACTION_TYPES:
        raise ValueError(f"unknown interaction type {t!r}; expected one of {INTERACTION_TYPES}")


def expand_type_filter(types: Optional[Iterable[str]]) -> Tuple[str, ...]:
    """Resolve a filter such as ``["ii", "iii-a"]`` to full type labels.

    ``None`` means every type except ``i``, whose error is trivially zero.
    """
    if types is None:
        return INTERACTION_TYPES[1:]
    if isinstance(types, str):
        types = [t for t in types.replace(",", " ").split() if t]
    out = []
    for t in types:
        t = t.strip().lower()
        if t == "all":
            out.extend(INTERACTION_TYPES)
            continue
        match = [x for x in INTERACTION_TYPES if x == t or x.split("-")[0] == t]
        if not match:
            raise ValueError(f"unknown interaction type {t!r}")
        out.extend(match)
    return tuple(x for x in INTERACTION_TYPES if x in out)


@dataclass(frozen=True)
class Triad:
    """Two incoming waves, the outgoing wave and the triadic frequency."""

    wave_a: WaveIndex
    wave_b: WaveIndex
    wave_out: WaveIndex
    omega: float

    @property
    def interaction_type(self) -> str:
        return classify(self)

    def mirror(self) -> "Triad":
        """Hermitian mirror of every wave; the frequency changes sign."""
        return Triad(self.wave_a.mirror(), self.wave_b.mirror(), self.wave_out.mirror(), -self.omega)


def classify(triad) -> str:
    """Interaction type of a :class:`Triad` or of a ``(alpha_a, alpha_b, alpha_out)`` tuple."""
    if isinstance(triad, Triad):
        modes = (triad.wave_a.alpha, triad.wave_b.alpha, triad.wave_out.alpha)
    else:
        modes = tuple(int(a) for a in triad)
    for a in modes:
        if a not in (-1, 0, 1):
            raise ValueError(f"mode branch must be -1, 0 or +1, got {a}")
    return _classify_modes(*modes)


def triad_frequency(params: PhysicalParams, grid: GridSpec, wave_a: WaveIndex, wave_b: WaveIndex, wave_out: WaveIndex) -> float:
    """``Omega = w_a + w_b - w_out``; the wavevectors must satisfy ``k_out = k_a + k_b``."""
    if (wave_a.zx + wave_b.zx, wave_a.zy + wave_b.zy) != (wave_out.zx, wave_out.zy):
        raise ValueError(f"triadic constraint violated: {wave_a} + {wave_b} -> {wave_out}")
    return dispersion(params, wave_a, grid) + dispersion(params, wave_b, grid) - dispersion(params, wave_out, grid)


def make_triad(params: PhysicalParams, grid: GridSpec, wave_a, wave_b, wave_out=None) -> Triad:
    """Build a :class:`Triad`; ``wave_out`` may be given as just its mode branch."""
    wave_a, wave_b = WaveIndex(*wave_a), WaveIndex(*wave_b)
    if wave_out is None or isinstance(wave_out, (int, np.integer)):
        alpha = 0 if wave_out is None else int(wave_out)
        wave_out = WaveIndex(wave_a.zx + wave_b.zx, wave_a.zy + wave_b.zy, alpha)
    wave_out = WaveIndex(*wave_out)
    for w in (wave_a, wave_b, wave_out):
        if not grid.resolvable(w.zx, w.zy):
            raise OutOfGridError(f"wave {w} is not resolvable")
    return Triad(wave_a, wave_b, wave_out, triad_frequency(params, grid, wave_a, wave_b, wave_out))


class TriadColumns(NamedTuple):
    za: np.ndarray  # (n, 2) int16 indices of wave a
    zb: np.ndarray
    zo: np.ndarray
    alpha: np.ndarray  # (n, 3) int8 mode branches (a, b, out)
    omega: np.ndarray  # (n,) float64


@dataclass
class DominantSubset:
    """Triads with ``|Omega| <= cutoff``, sorted by ``|Omega|`` ascending."""

    cutoff: float
    za: np.ndarray
    zb: np.ndarray
    zo: np.ndarray
    alpha: np.ndarray
    omega: np.ndarray
    # physical frequencies of the three waves, kept so error sweeps need no recomputation
    w: np.ndarray

    def __len__(self) -> int:
        return len(self.omega)

    @property
    def N(self) -> int:
        return len(self)

    @property
    def type_codes(self) -> np.ndarray:
        a = self.alpha.astype(int) + 1
        return _TYPE_CODE[9 * a[:, 0] + 3 * a[:, 1] + a[:, 2]]

    @property
    def types(self) -> np.ndarray:
        return np.array(INTERACTION_TYPES, dtype=object)[self.type_codes]

    def triad(self, i: int) -> Triad:
        a = WaveIndex(int(self.za[i, 0]), int(self.za[i, 1]), int(self.alpha[i, 0]))
        b = WaveIndex(int(self.zb[i, 0]), int(self.zb[i, 1]), int(self.alpha[i, 1]))
        o = WaveIndex(int(self.zo[i, 0]), int(self.zo[i, 1]), int(self.alpha[i, 2]))
        return Triad(a, b, o, float(self.omega[i]))

    def __iter__(self) -> Iterator[Triad]:
        for i in range(len(self)):
            yield self.triad(i)

    def select(self, mask) -> "DominantSubset":
        return DominantSubset(self.cutoff, self.za[mask], self.zb[mask], self.zo[mask],
                              self.alpha[mask], self.omega[mask], self.w[mask])

    def counts(self) -> dict:
        codes = np.bincount(self.type_codes, minlength=len(INTERACTION_TYPES))
        return {t: int(n) for t, n in zip(INTERACTION_TYPES, codes)}

    def write_csv(self, stream) -> None:
        """CSV with columns ``zx_a, zy_a, alpha_a, zx_b, zy_b, alpha_b, zx, zy, alpha, omega, type``."""
        stream.write("zx_a,zy_a,alpha_a,zx_b,zy_b,alpha_b,zx,zy,alpha,omega,type\n")
        types = self.types
        chunk = 100000
        for s in range(0, len(self), chunk):
            e = min(s + chunk, len(self))
            ints = np.concatenate(
                [self.za[s:e], self.alpha[s:e, :1], self.zb[s:e], self.alpha[s:e, 1:2],
                 self.zo[s:e], self.alpha[s:e, 2:]], axis=1).tolist()
            om = self.omega[s:e].tolist()
            buf = io.StringIO()
            for row, o, t in zip(ints, om, types[s:e]):
                buf.write(",".join(map(str, row)))
                buf.write(f",{o!r},{t}\n")
            stream.write(buf.getvalue())


def _wave_lists(grid: GridSpec):
    zx = np.arange(-grid.nx // 2, grid.nx // 2)
    zy = np.arange(-grid.ny // 2, grid.ny // 2) if grid.ny > 1 else np.zeros(1, int)
    X, Y = np.meshgrid(zx, zy, indexing="ij")
    return X.ravel(), Y.ravel()


def _psi(params, grid, zx, zy):
    k = 2 * np.pi * zx / grid.lx
    l = 2 * np.pi * zy / grid.ly
    return np.sqrt(params.f**2 + params.c**2 * (k * k + l * l))


def _in_range(z, n):
    if n == 1:
        return z == 0
    return (z >= -n // 2) & (z < n // 2)


def _pair_block(params, grid, X, Y, rows, include_zero):
    """Resolvable (a, b) pairs for a block of a-indices."""
    ia = np.repeat(rows, len(X))
    ib = np.tile(np.arange(len(X)), len(rows))
    kx = X[ia] + X[ib]
    ky = Y[ia] + Y[ib]
    ok = _in_range(kx, grid.nx) & _in_range(ky, grid.ny)
    if not include_zero:
        ok &= ~((X[ia] == 0) & (Y[ia] == 0) & (X[ib] == 0) & (Y[ib] == 0))
    ia, ib, kx, ky = ia[ok], ib[ok], kx[ok], ky[ok]
    return ia, ib, kx, ky, _psi(params, grid, kx, ky)


def _blocks(n, size):
    return [np.arange(s, min(s + size, n)) for s in range(0, n, size)]


def _map_blocks(fn, blocks, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, blocks))
    return [fn(b) for b in blocks]


def enumerate_triads(
    params: PhysicalParams,
    grid: GridSpec,
    types: Optional[Iterable[str]] = None,
    omega_cutoff: float = math.inf,
    include_zero: bool = True,
    jobs: int = 1,
    block: int = 128,
) -> DominantSubset:
    """All resolvable triads of the requested types with ``|Omega| <= omega_cutoff``.

    Incoming pairs are unordered: a pair is kept once, with ``(zx, zy, alpha)``
    of wave ``a`` lexicographically not greater than that of wave ``b``.
    Results are sorted by ``|Omega|`` with ties broken by the wave indices.
    """
    if omega_cutoff < 0:
        raise ValueError("omega_cutoff must be >= 0")
    wanted = expand_type_filter(types)
    perms = [p for p in _MODE_PERMS if _classify_modes(*p) in wanted]
    X, Y = _wave_lists(grid)
    psi_in = _psi(params, grid, X, Y)

    def work(rows):
        ia, ib, kx, ky, psi_o = _pair_block(params, grid, X, Y, rows, include_zero)
        pa, pb = psi_in[ia], psi_in[ib]
        # lexicographic (zx, zy) order of the two incoming wavevectors
        lt = (X[ia] < X[ib]) | ((X[ia] == X[ib]) & (Y[ia] < Y[ib]))
        eq = (X[ia] == X[ib]) & (Y[ia] == Y[ib])
        parts = []
        for aa, ab, ao in perms:
            keep = lt | (eq & (aa <= ab))
            om = aa * pa + ab * pb - ao * psi_o
            m = keep & (np.abs(om) <= omega_cutoff)
            if not m.any():
                continue
            n = int(m.sum())
            parts.append((ia[m], ib[m], kx[m], ky[m], np.tile(np.array([aa, ab, ao], np.int8), (n, 1)), om[m],
                          np.stack([aa * pa[m], ab * pb[m], ao * psi_o[m]], axis=1)))
        return parts

    parts = [p for blk in _map_blocks(work, _blocks(len(X), block), jobs) for p in blk]
    if parts:
        ia, ib, kx, ky, alpha, om, w = (np.concatenate(c) for c in zip(*parts))
    else:
        ia = ib = kx = ky = np.zeros(0, int)
        alpha, om, w = np.zeros((0, 3), np.int8), np.zeros(0), np.zeros((0, 3))
    za = np.stack([X[ia], Y[ia]], axis=1).astype(np.int16)
    zb = np.stack([X[ib], Y[ib]], axis=1).astype(np.int16)
    zo = np.stack([kx, ky], axis=1).astype(np.int16)
    order = np.lexsort((alpha[:, 2], zo[:, 1], zo[:, 0], alpha[:, 1], zb[:, 1], zb[:, 0],
                        alpha[:, 0], za[:, 1], za[:, 0], np.abs(om)))
    return DominantSubset(float(omega_cutoff), za[order], zb[order], zo[order], alpha[order], om[order], w[order])


def frequency_ranges(
    params: PhysicalParams,
    grid: GridSpec,
    types: Optional[Sequence[str]] = None,
    include_zero: bool = True,
    jobs: int = 1,
    block: int = 128,
) -> dict:
    """``{type: (min |Omega|, max |Omega|)}`` over all resolvable triads, without storing them."""
    wanted = INTERACTION_TYPES if types is None else expand_type_filter(types)
    X, Y = _wave_lists(grid)
    psi_in = _psi(params, grid, X, Y)

    def work(rows):
        ia, ib, kx, ky, psi_o = _pair_block(params, grid, X, Y, rows, include_zero)
        pa, pb = psi_in[ia], psi_in[ib]
        out = {}
        for t in wanted:
            lo, hi = math.inf, -math.inf
            for aa, ab, ao in mode_permutations(t):
                om = np.abs(aa * pa + ab * pb - ao * psi_o)
                if om.size:
                    lo, hi = min(lo, float(om.min())), max(hi, float(om.max()))
            out[t] = (lo, hi)
        return out

    res = _map_blocks(work, _blocks(len(X), block), jobs)
    ranges = {}
    for t in wanted:
        lo = min(r[t][0] for r in res)
        hi = max(r[t][1] for r in res)
        ranges[t] = (0.0, 0.0) if t == "i" else (lo, hi)
    return ranges


def frequency_range(params: PhysicalParams, grid: GridSpec, interaction_type: str, **kw) -> Tuple[float, float]:
    """Minimum and maximum ``|Omega|`` over all resolvable triads of one type."""
    _check_type(interaction_type)
    return frequency_ranges(params, grid, [interaction_type], **kw)[interaction_type]
