"""Stability polynomials on the oscillation equation ``dU/dt = i omega U``.

``amplification(scheme, W)`` returns the one-step factor ``P(W)`` with
``W = i omega dt``.  Inputs may be Python/NumPy complex values (vectorised)
or ``mpmath.mpc`` scalars for extended-precision error analysis.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np


class PoleError(ZeroDivisionError):
    """The rational stability function has a pole at the requested argument."""


class RootFindingError(ArithmeticError):
    pass


_KINDS = ("RK", "ALPHA", "AB3", "TRBDF2", "ETD")


@dataclass(frozen=True)
class Scheme:
    """Identity of a timestepper: ``RK(k)``, ``ALPHA(a)``, ``AB3``, ``TRBDF2`` or ``ETD``."""

    kind: str
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "RK" and self.param not in (1, 2, 3, 4):
            raise ValueError(f"RK order must be 1..4, got {self.param}")
        if self.kind == "ALPHA":
            if self.param is None:
                raise ValueError("ALPHA scheme needs a parameter")
            object.__setattr__(self, "param", float(min(max(self.param, 0.0), 1.0)))
        if self.kind == "RK":
            object.__setattr__(self, "param", int(self.param))

    @classmethod
    def rk(cls, order: int) -> "Scheme":
        return cls("RK", order)

    @classmethod
    def alpha(cls, a: float) -> "Scheme":
        return cls("ALPHA", a)

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        """Parse names such as ``RK4``, ``ALPHA0.55``, ``TRAP``, ``AB3``, ``TRBDF2``, ``ETDRK2``."""
        t = text.strip().upper().replace("-", "").replace("_", "")
        if m := re.fullmatch(r"RK([1-4])", t):
            return cls.rk(int(m.group(1)))
        if m := re.fullmatch(r"ALPHA\(?([0-9.]+)\)?", t):
            return cls.alpha(float(m.group(1)))
        if t in ("TRAP", "TRAPEZOIDAL", "CN"):
            return cls.alpha(0.5)
        if t in ("FE", "FORWARDEULER"):
            return cls.alpha(0.0)
        if t in ("BE", "BACKWARDEULER"):
            return cls.alpha(1.0)
        if t == "AB3":
            return cls("AB3")
        if t == "TRBDF2":
            return cls("TRBDF2")
        if t in ("ETD", "ETDRK2"):
            return cls("ETD")
        raise ValueError(f"unknown scheme name {text!r}")

    @property
    def name(self) -> str:
        if self.kind == "RK":
            return f"RK{self.param}"
        if self.kind == "ALPHA":
            return "TRAP" if self.param == 0.5 else f"ALPHA{self.param:g}"
        return "ETDRK2" if self.kind == "ETD" else self.kind

    def __str__(self):
        return self.name

    @property
    def unconditionally_stable(self) -> bool:
        if self.kind == "ALPHA":
            return self.param >= 0.5
        return self.kind in ("TRBDF2", "ETD")


def _is_mp(W) -> bool:
    return isinstance(W, (mpmath.mpc, mpmath.mpf))


def amplification(scheme: Scheme, W):
    """One-step amplification ``P(W)`` of ``scheme``."""
    mp = _is_mp(W)
    if not mp:
        W = np.asarray(W, dtype=complex)
    if scheme.kind == "RK":
        total = 1 + 0 * W
        term = 1 + 0 * W
        for j in range(1, scheme.param + 1):
            term = term * W / j
            total = total + term
        return total
    if scheme.kind == "ALPHA":
        a = scheme.param
        return _rational(1 + (1 - a) * W, 1 - a * W, mp)
    if scheme.kind == "TRBDF2":
        return _rational(1 + 5 * W / 12, 1 - 7 * W / 12 + W * W / 12, mp)
    if scheme.kind == "ETD":
        return mpmath.exp(W) if mp else np.exp(W)
    if scheme.kind == "AB3":
        roots, phys = ab3_roots(W)
        if mp:
            return roots[phys]
        return np.take_along_axis(roots, phys[..., None], axis=-1)[..., 0]
    raise ValueError(scheme)


def _rational(num, den, mp):
    if mp:
        if den == 0:
            raise PoleError("stability function pole")
        return num / den
    if np.any(den == 0):
        raise PoleError("stability function pole")
    return num / den


def ab3_cubic(W, lam):
    """Characteristic polynomial of AB3 on the oscillation equation."""
    return lam**3 - (1 + 23 * W / 12) * lam**2 + (16 * W / 12) * lam - 5 * W / 12


def ab3_roots(W):
    """All roots of the AB3 cubic and the index of the physical one.

    The physical root is the one nearest ``exp(W)``.  For array input the roots
    have shape ``W.shape + (3,)`` and the index array has shape ``W.shape``.
    """
    if _is_mp(W):
        coeffs = [1, -(1 + 23 * W / 12), 16 * W / 12, -5 * W / 12]
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * mpmath.mp.prec)
        except mpmath.libmp.NoConvergence as exc:
            raise RootFindingError(str(exc)) from exc
        target = mpmath.exp(W)
        phys = min(range(3), key=lambda i: abs(roots[i] - target))
        return list(roots), phys

    W = np.asarray(W, dtype=complex)
    comp = np.zeros(W.shape + (3, 3), complex)
    comp[..., 0, 0] = 1 + 23 * W / 12
    comp[..., 0, 1] = -16 * W / 12
    comp[..., 0, 2] = 5 * W / 12
    comp[..., 1, 0] = 1
    comp[..., 2, 1] = 1
    roots = np.linalg.eigvals(comp)
    if not np.all(np.isfinite(roots)):
        raise RootFindingError("AB3 root finder produced non-finite roots")
    roots = _polish_roots(W, roots)
    phys = np.argmin(np.abs(roots - np.exp(W)[..., None]), axis=-1)
    return roots, phys


def _polish_roots(W, roots, iters=3):
    """Newton refinement of companion-matrix roots."""
    Wb = W[..., None]
    for _ in range(iters):
        p = ab3_cubic(Wb, roots)
        dp = 3 * roots**2 - 2 * (1 + 23 * Wb / 12) * roots + 16 * Wb / 12
        safe = np.abs(dp) > 1e-8
        roots = np.where(safe, roots - p / np.where(safe, dp, 1), roots)
    return roots


def max_root_modulus(scheme: Scheme, W):
    """Spectral radius of the one-step map (all roots for AB3)."""
    if scheme.kind == "AB3":
        roots, _ = ab3_roots(W)
        return np.max(np.abs(roots), axis=-1)
    return np.abs(amplification(scheme, W))


def oscillatory_stability_limit(
    scheme: Scheme,
    omega_max: float,
    tol: float = 1e-12,
    rtol: float = 1e-6,
    theta_max: float = 50.0,
) -> float:
    """Largest ``dt`` with ``|P(i omega dt)| <= 1 + tol`` for all ``|omega| <= omega_max``.

    For AB3 every root of the characteristic cubic must satisfy the bound.
    Returns ``inf`` for unconditionally stable schemes and 0 for schemes that
    amplify every oscillation.
    """
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    if scheme.unconditionally_stable:
        return math.inf

    def stable(theta):
        return bool(max_root_modulus(scheme, 1j * theta) <= 1 + tol)

    # scan for the first unstable theta, then bisect the bracket
    thetas = np.linspace(0, theta_max, 50001)[1:]
    rad = max_root_modulus(scheme, 1j * thetas)
    bad = np.nonzero(rad > 1 + tol)[0]
    if bad.size == 0:
        return math.inf
    if bad[0] == 0:
        lo, hi = 0.0, thetas[0]
    else:
        lo, hi = thetas[bad[0] - 1], thetas[bad[0]]
    while hi - lo > rtol * max(hi, 1e-300) and hi > 1e-14:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo / omega_max
