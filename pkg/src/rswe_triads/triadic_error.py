"""Single-step error of the discretised triadic propagator.

Over one step the exact propagator is ``exp(i Omega dt)``; a timestepper
replaces it by ``P(W_a) P(W_b) P(-W_out)`` with ``W = i omega dt``.  The
triadic error is the modulus of the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import mpmath
import numpy as np

from .spectral_core import GridSpec, PhysicalParams, dispersion
from .stability import Scheme, amplification
from .triads import DominantSubset, Triad

EXACT_ZERO = 1e-14


def exact_propagator(omega: float, dt: float) -> complex:
    """``exp(i Omega dt)``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return complex(np.exp(1j * omega * dt))


def _wave_frequencies(triad: Triad, params: PhysicalParams, grid: GridSpec):
    return (dispersion(params, triad.wave_a, grid), dispersion(params, triad.wave_b, grid),
            dispersion(params, triad.wave_out, grid))


def numerical_propagator(scheme: Scheme, triad: Triad, params: PhysicalParams, grid: GridSpec, dt: float) -> complex:
    """``P(W_a) P(W_b) P(-W_out)`` for one triad."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    wa, wb, wo = _wave_frequencies(triad, params, grid)
    p = amplification(scheme, 1j * dt * np.array([wa, wb, -wo]))
    return complex(p[0] * p[1] * p[2])


def triadic_error(scheme: Scheme, triad: Triad, params: PhysicalParams, grid: GridSpec, dt: float) -> float:
    """``|exp(i Omega dt) - P(W_a) P(W_b) P(-W_out)|``."""
    wa, wb, wo = _wave_frequencies(triad, params, grid)
    return float(triadic_error_from_frequencies(scheme, wa, wb, wo, dt))


def triadic_error_from_frequencies(scheme: Scheme, wa, wb, wo, dt: float):
    """Vectorised triadic error for arrays of wave frequencies."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    wa, wb, wo = (np.asarray(x, float) for x in (wa, wb, wo))
    omega = wa + wb - wo
    if scheme.kind == "AB3":
        # root finding is the costly part; solve once per distinct frequency
        allw = np.concatenate([wa.ravel(), wb.ravel(), -wo.ravel()])
        uniq, inv = np.unique(allw, return_inverse=True)
        p = amplification(scheme, 1j * dt * uniq)[inv].reshape((3,) + wa.shape)
        numeric = p[0] * p[1] * p[2]
    else:
        numeric = amplification(scheme, 1j * dt * wa) * amplification(scheme, 1j * dt * wb) * amplification(scheme, -1j * dt * wo)
    return np.abs(np.exp(1j * omega * dt) - numeric)


def triadic_error_mp(scheme: Scheme, wa: float, wb: float, wo: float, dt: float, dps: int = 50):
    """Triadic error in extended precision (an ``mpf``)."""
    with mpmath.workdps(dps):
        wa, wb, wo, dt = (mpmath.mpf(x) for x in (wa, wb, wo, dt))
        W = lambda w: mpmath.mpc(0, w * dt)
        numeric = amplification(scheme, W(wa)) * amplification(scheme, W(wb)) * amplification(scheme, -W(wo))
        return abs(mpmath.expj((wa + wb - wo) * dt) - numeric)


def average_triadic_error(scheme: Scheme, subset: DominantSubset, dt: float) -> float:
    """Mean triadic error over a dominant subset."""
    if len(subset) == 0:
        raise ValueError("average over an empty triad subset is undefined")
    E = triadic_error_from_frequencies(scheme, subset.w[:, 0], subset.w[:, 1], subset.w[:, 2], dt)
    return float(np.mean(E))


@dataclass(frozen=True)
class ConvergenceFit:
    """Least-squares slope of ``log E`` against ``log dt``; ``exact`` when E vanishes."""

    slope: Optional[float]
    exact: bool
    dts: tuple
    errors: tuple

    def __str__(self):
        return "exact" if self.exact else f"{self.slope:.4f}"


def default_dt_grid(lo: float = 1e-4, hi: float = 1e-2, per_decade: int = 8) -> np.ndarray:
    n = int(round(per_decade * math.log10(hi / lo))) + 1
    return np.logspace(math.log10(lo), math.log10(hi), n)


def convergence_order(
    scheme: Scheme,
    triad: Triad,
    params: PhysicalParams,
    grid: GridSpec,
    dts: Optional[Sequence[float]] = None,
    dps: int = 50,
) -> ConvergenceFit:
    """Fit the order at which the triadic error vanishes as ``dt -> 0``.

    Errors are evaluated with ``dps`` decimal digits because high-order
    schemes reach values far below double-precision roundoff on the
    default ``dt`` grid.
    """
    dts = default_dt_grid() if dts is None else np.asarray(dts, float)
    if dts.size < 2 or dts.max() / dts.min() < 10 * (1 - 1e-12):
        raise ValueError("dt range must span at least one decade")
    wa, wb, wo = _wave_frequencies(triad, params, grid)
    errs = [triadic_error_mp(scheme, wa, wb, wo, dt, dps) for dt in dts]
    if all(e < EXACT_ZERO for e in errs):
        return ConvergenceFit(None, True, tuple(dts), tuple(float(e) for e in errs))
    if any(e == 0 for e in errs):
        raise ArithmeticError("triadic error vanishes at some but not all dt; slope undefined")
    x = np.log(dts)
    y = np.array([float(mpmath.log(e)) for e in errs])
    slope = float(np.polyfit(x, y, 1)[0])
    return ConvergenceFit(slope, False, tuple(dts), tuple(float(e) for e in errs))


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    dt: float
    omega_c: float
    mean_error: float
    n_triads: int


def triad_error_sweep(
    schemes: Iterable[Scheme],
    dts: Iterable[float],
    subsets: Iterable[DominantSubset],
) -> List[SweepRow]:
    """Mean triadic error for every (subset, scheme, dt) combination, in that nesting order."""
    rows = []
    dts = list(dts)
    schemes = list(schemes)
    for sub in subsets:
        for s in schemes:
            for dt in dts:
                rows.append(SweepRow(s.name, float(dt), sub.cutoff, average_triadic_error(s, sub, dt), len(sub)))
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], stream) -> None:
    stream.write("scheme,dt,omega_c,mean_error,n_triads\n")
    for r in rows:
        stream.write(f"{r.scheme},{r.dt!r},{r.omega_c!r},{r.mean_error!r},{r.n_triads}\n")
