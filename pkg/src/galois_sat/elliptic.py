"""Jacobi elliptic functions and complete elliptic integrals.

Real arguments are handled by the descending Landen (AGM) scheme; complex
arguments ``u = x + iy`` are split with the addition theorem into real
evaluations at modulus ``k`` (for ``x``) and at the complementary modulus
``k'`` (for ``y``).  Everything is vectorised over ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Divergent, InvalidModulus, PoleProximity

POLE_TOL = 1e-8
_AGM_TOL = 1e-16
_AGM_MAXITER = 40


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus ``k`` in (0, 1) with its positive complement ``kprime``."""

    k: float
    kprime: float = float("nan")

    def __post_init__(self):
        k = float(self.k)
        if not (0.0 < k < 1.0) or math.isnan(k):
            raise InvalidModulus(f"modulus k={self.k!r} outside (0, 1)")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kprime", math.sqrt((1.0 - k) * (1.0 + k)))

    @property
    def K(self) -> float:
        return complete_K(self.k)

    @property
    def Kprime(self) -> float:
        return complete_K(self.kprime)


def as_modulus(m) -> EllipticModulus:
    return m if isinstance(m, EllipticModulus) else EllipticModulus(float(m))


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative reals."""
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention.

    ``K(k) = pi / (2 agm(1, k'))``; diverges logarithmically as k -> 1.
    """
    k = float(k)
    if not (0.0 <= abs(k) < 1.0):
        raise Divergent(f"K(k) diverges for |k| >= 1 (k={k!r})")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, kp))


def complete_Kprime(k: float) -> float:
    """``K'(k) = K(k')``."""
    k = float(k)
    if not (0.0 < abs(k) <= 1.0):
        raise Divergent(f"K'(k) diverges for k = 0")
    return complete_K(math.sqrt((1.0 - k) * (1.0 + k)))


def _landen_table(k: float):
    a, b, c = [1.0], [math.sqrt((1.0 - k) * (1.0 + k))], [k]
    while abs(c[-1]) > _AGM_TOL * a[-1] and len(a) < _AGM_MAXITER:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    return a, c


def _jacobi_real(x: np.ndarray, k: float, K: float):
    """sn, cn, dn for real ``x`` and 0 <= k < 1 (descending Landen)."""
    x = np.asarray(x, dtype=float)
    if k == 0.0:
        return np.sin(x), np.cos(x), np.ones_like(x)
    # reduce to [-2K, 2K): all three functions are 4K-periodic
    x = x - 4.0 * K * np.floor((x + 2.0 * K) / (4.0 * K))
    a, c = _landen_table(k)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * x
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c[j] / a[j] * np.sin(phi), -1.0, 1.0)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(np.maximum(1.0 - k * k * sn * sn, 0.0))
    return sn, cn, dn


def pole_distance(u, m) -> np.ndarray:
    """Distance from ``u`` to the nearest common pole ``2mK + (2n+1)iK'``."""
    m = as_modulus(m)
    K, Kp = m.K, m.Kprime
    u = np.asarray(u, dtype=complex)
    x, y = u.real, u.imag
    dx = x - 2.0 * K * np.round(x / (2.0 * K))
    dy = (y - Kp) - 2.0 * Kp * np.round((y - Kp) / (2.0 * Kp))
    return np.hypot(dx, dy)


def jacobi(u, m, pole_tol: float = POLE_TOL):
    """Jacobi ``(sn, cn, dn)`` of (complex) argument ``u`` and modulus ``m``.

    Parameters
    ----------
    u : complex or array_like
        Argument; real input returns real arrays.
    m : EllipticModulus or float
        Modulus ``k`` (not the parameter ``k**2``).
    pole_tol : float
        Minimum admissible distance to a pole ``iK' + 2K Z + 2iK' Z``.

    Raises
    ------
    InvalidModulus
        If ``k`` is not in (0, 1).
    PoleProximity
        If any ``u`` lies within ``pole_tol`` of a pole.
    """
    m = as_modulus(m)
    k, kp = m.k, m.kprime
    K, Kp = m.K, m.Kprime
    scalar = np.ndim(u) == 0
    uarr = np.atleast_1d(np.asarray(u))
    if not np.iscomplexobj(uarr) or not np.any(uarr.imag):
        s, c, d = _jacobi_real(uarr.real, k, K)
        if np.iscomplexobj(uarr):
            s, c, d = s.astype(complex), c.astype(complex), d.astype(complex)
    else:
        dist = pole_distance(uarr, m)
        if np.any(dist < pole_tol):
            raise PoleProximity(
                f"argument within {dist.min():.3e} of a pole of sn/cn/dn")
        s, c, d = _jacobi_real(uarr.real, k, K)
        s1, c1, d1 = _jacobi_real(uarr.imag, kp, Kp)
        den = c1 * c1 + k * k * s * s * s1 * s1
        sn = (s * d1 + 1j * c * d * s1 * c1) / den
        cn = (c * c1 - 1j * s * d * s1 * d1) / den
        dn = (d * c1 * d1 - 1j * k * k * s * c * s1) / den
        s, c, d = sn, cn, dn
    if scalar:
        return s[0], c[0], d[0]
    return s, c, d
