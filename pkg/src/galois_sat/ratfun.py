"""Complex rational functions with factored denominators.

A :class:`RationalFunction` keeps its denominator as a list of
``(pole, multiplicity)`` pairs instead of expanded coefficients.  Sums,
products and derivatives then never need a root finder, and partial
fractions at a double pole are read off by local Taylor division rather
than from numerically split eigenvalues.  Root finding (companion matrix
plus Newton polishing, with cluster detection for multiple roots) is used
only when a denominator arrives in expanded form, e.g. from JSON.

Polynomials are plain :class:`numpy.polynomial.Polynomial` objects with
complex, ascending coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ClusteredRoots

COPRIME_TOL = 1e-10
POLE_MATCH_TOL = 1e-12
CLUSTER_TOL = 1e-6
SNAP_TOL = 1e-9
SNAP_MAX_DEN = 64


def poly(coeffs) -> Polynomial:
    """Complex polynomial from ascending coefficients."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.size == 0:
        c = np.zeros(1, dtype=complex)
    return Polynomial(c)


def trim(p: Polynomial, tol: float = 0.0) -> Polynomial:
    c = np.asarray(p.coef, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    n = c.size
    while n > 1 and abs(c[n - 1]) <= tol * scale:
        n -= 1
    if scale == 0.0:
        n = 1
    return Polynomial(c[:n])


def degree(p: Polynomial) -> int:
    """Degree after dropping exact-zero leading terms; -1 for the zero poly."""
    c = np.asarray(p.coef)
    nz = np.nonzero(c)[0]
    return int(nz[-1]) if nz.size else -1


def abs_scale(p: Polynomial, z: complex) -> float:
    """``sum |c_i| |z|^i``; the natural scale for judging ``|p(z)|``."""
    return float(np.polynomial.polynomial.polyval(abs(z), np.abs(p.coef)))


def taylor_shift(p: Polynomial, c: complex) -> np.ndarray:
    """Coefficients of ``p(c + h)`` in ascending powers of ``h``."""
    coef = np.array(p.coef, dtype=complex)
    n = coef.size
    out = coef.copy()
    # repeated synthetic division
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += c * out[j + 1]
    return out


def _deflate(p: Polynomial, c: complex) -> Polynomial:
    """Quotient of ``p`` by ``(z - c)`` (remainder discarded)."""
    coef = np.array(p.coef, dtype=complex)
    n = coef.size
    if n <= 1:
        return poly([0.0])
    q = np.zeros(n - 1, dtype=complex)
    acc = coef[-1]
    q[-1] = acc
    for j in range(n - 2, 0, -1):
        acc = coef[j] + c * acc
        q[j - 1] = acc
    return Polynomial(q)


def find_roots(p: Polynomial, cluster_tol: float = CLUSTER_TOL):
    """Roots of ``p`` with multiplicities.

    Companion-matrix eigenvalues are grouped into clusters of radius
    ``cluster_tol`` (relative to ``max(1, |root|)``); each cluster of size
    ``m`` is replaced by its centroid and polished by Newton iteration on
    ``p^(m-1)``, where the root is simple.

    Returns
    -------
    list of (complex, int)

    Raises
    ------
    ClusteredRoots
        If a cluster does not behave as a numerical multiple root.
    """
    p = trim(p)
    if degree(p) < 1:
        return []
    raw = list(np.roots(p.coef[::-1]))
    clusters: list[list[complex]] = []
    for r in sorted(raw, key=lambda x: (round(x.real, 6), round(x.imag, 6))):
        for cl in clusters:
            ctr = np.mean(cl)
            if abs(r - ctr) <= cluster_tol * max(1.0, abs(ctr)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    out = []
    for cl in clusters:
        m = len(cl)
        z = complex(np.mean(cl))
        d = p.deriv(m - 1) if m > 1 else p
        dd = d.deriv()
        for _ in range(50):
            den = dd(z)
            if den == 0:
                break
            step = d(z) / den
            z -= step
            if abs(step) <= 1e-16 * max(1.0, abs(z)):
                break
        for j in range(m):
            val = p.deriv(j)(z) if j else p(z)
            if abs(val) > 1e-7 * max(abs_scale(p.deriv(j) if j else p, z), 1e-300):
                raise ClusteredRoots(
                    f"roots near {z:.6g} are clustered but not a multiple root")
        out.append((z, m))
    return out


def _match(c: complex, poles: Sequence[tuple[complex, int]]) -> int:
    for i, (d, _) in enumerate(poles):
        if abs(c - d) <= POLE_MATCH_TOL * max(1.0, abs(c)):
            return i
    return -1


def _factor_poly(poles: Sequence[tuple[complex, int]], skip: int = -1) -> Polynomial:
    out = poly([1.0])
    for i, (c, m) in enumerate(poles):
        if i == skip:
            continue
        for _ in range(m):
            out = out * poly([-c, 1.0])
    return out


def snap_rational(x, tol: float = SNAP_TOL, max_den: int = SNAP_MAX_DEN):
    """Return a :class:`Fraction` if ``x`` is within ``tol`` of ``p/q`` with
    ``q <= max_den``; otherwise return ``x`` unchanged."""
    x = complex(x)
    if abs(x.imag) > tol:
        return x
    f = Fraction(x.real).limit_denominator(max_den)
    if abs(float(f) - x.real) < tol:
        return f
    return x


@dataclass(frozen=True)
class PoleTerm:
    """Principal part at one pole: ``sum_j coeffs[j] / (z - pole)^(j+1)``."""

    pole: complex
    order: int
    coeffs: tuple

    @property
    def a(self) -> complex:
        """Coefficient of ``(z - c)^-2`` (zero for simple poles)."""
        return self.coeffs[1] if self.order >= 2 else 0j

    @property
    def b(self) -> complex:
        """Coefficient of ``(z - c)^-1`` (the residue)."""
        return self.coeffs[0]

    @property
    def a_exact(self):
        return snap_rational(self.a)


@dataclass(frozen=True)
class Decomposition:
    polynomial_part: Polynomial
    terms: tuple

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.polynomial_part(z)
        for t in self.terms:
            for j, c in enumerate(t.coeffs):
                out = out + c / (z - t.pole) ** (j + 1)
        return out

    def term_at(self, c: complex) -> PoleTerm:
        i = _match(c, [(t.pole, t.order) for t in self.terms])
        if i < 0:
            # looser match for caller-supplied approximations
            i = int(np.argmin([abs(t.pole - c) for t in self.terms]))
        return self.terms[i]


@dataclass(frozen=True)
class SingularSet:
    finite_points: tuple  # ((c, order), ...)
    order_infinity: int

    @property
    def fuchsian(self) -> bool:
        return all(m <= 2 for _, m in self.finite_points) and self.order_infinity <= 2


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``num(z) / prod (z - c)^m`` over the stored poles (monic denominator)."""

    num: Polynomial
    poles: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_parts(cls, num, poles=(), reduce: bool = True) -> "RationalFunction":
        if not isinstance(num, Polynomial):
            num = poly(num)
        merged: list[tuple[complex, int]] = []
        for c, m in poles:
            if m <= 0:
                continue
            i = _match(complex(c), merged)
            if i >= 0:
                merged[i] = (merged[i][0], merged[i][1] + m)
            else:
                merged.append((complex(c), int(m)))
        rf = cls(trim(num), tuple(merged))
        return rf._cancel() if reduce else rf

    @classmethod
    def from_polynomials(cls, num, den) -> "RationalFunction":
        """From expanded numerator/denominator; the denominator is factored
        by :func:`find_roots` and made monic."""
        num = num if isinstance(num, Polynomial) else poly(num)
        den = trim(den if isinstance(den, Polynomial) else poly(den))
        lead = den.coef[-1]
        if lead == 0:
            raise ZeroDivisionError("zero denominator")
        return cls.from_parts(num / lead, find_roots(den))

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(poly([c]), ())

    @classmethod
    def identity(cls) -> "RationalFunction":
        return cls(poly([0.0, 1.0]), ())

    # --- structure -------------------------------------------------------
    def _cancel(self) -> "RationalFunction":
        num = self.num
        poles = list(self.poles)
        changed = True
        while changed:
            changed = False
            if degree(num) < 0:
                return RationalFunction(poly([0.0]), ())
            for i, (c, m) in enumerate(poles):
                if m == 0:
                    continue
                if abs(num(c)) <= COPRIME_TOL * max(abs_scale(num, c), 1e-300):
                    num = _deflate(num, c)
                    poles[i] = (c, m - 1)
                    changed = True
        return RationalFunction(trim(num), tuple((c, m) for c, m in poles if m > 0))

    @property
    def den(self) -> Polynomial:
        return _factor_poly(self.poles)

    @property
    def deg_num(self) -> int:
        return degree(self.num)

    @property
    def deg_den(self) -> int:
        return sum(m for _, m in self.poles)

    # --- evaluation and arithmetic --------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.num(z)
        for c, m in self.poles:
            out = out / (z - c) ** m
        return out

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other, ())
        return RationalFunction.constant(other)

    def _common(self, other: "RationalFunction"):
        poles = [list(p) for p in self.poles]
        for c, m in other.poles:
            i = _match(c, poles)
            if i >= 0:
                poles[i][1] = max(poles[i][1], m)
            else:
                poles.append([c, m])
        poles = [tuple(p) for p in poles]

        def scaled(rf):
            extra = []
            for c, m in poles:
                i = _match(c, rf.poles)
                have = rf.poles[i][1] if i >= 0 else 0
                extra.append((c, m - have))
            return rf.num * _factor_poly(extra)

        return poles, scaled(self), scaled(other)

    def __add__(self, other):
        other = self._lift(other)
        poles, a, b = self._common(other)
        return RationalFunction.from_parts(a + b, poles)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.poles)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return RationalFunction.from_parts(self.num * other.num,
                                           list(self.poles) + list(other.poles))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RationalFunction):
            if other.poles or degree(other.num) > 0:
                inv_poles = find_roots(other.num)
                lead = other.num.coef[degree(other.num)]
                inv = RationalFunction.from_parts(_factor_poly(other.poles) / lead, inv_poles)
                return self * inv
            other = other.num.coef[0]
        return RationalFunction(self.num / other, self.poles)

    def __pow__(self, n: int):
        out = RationalFunction.constant(1.0)
        for _ in range(int(n)):
            out = out * self
        return out

    def deriv(self) -> "RationalFunction":
        """Quotient rule in factored form: ``(N' D - N D') / D``."""
        # r = N / prod (z-c)^m  ->  r' = [N' * prod(z-c) - N * sum m prod_{d!=c}(z-d)] / prod (z-c)^(m+1)
        simple = [(c, 1) for c, _ in self.poles]
        lead = self.num.deriv() * _factor_poly(simple)
        corr = poly([0.0])
        for i, (c, m) in enumerate(self.poles):
            corr = corr + m * _factor_poly(simple, skip=i)
        num = lead - self.num * corr
        return RationalFunction.from_parts(num, [(c, m + 1) for c, m in self.poles])

    def conjugate_coefficients(self) -> "RationalFunction":
        return RationalFunction(poly(np.conj(self.num.coef)),
                                tuple((np.conj(c), m) for c, m in self.poles))

    # --- analysis ---------------------------------------------------------
    def partial_fractions(self) -> Decomposition:
        """Polynomial part plus principal parts at every pole.

        Raises
        ------
        ClusteredRoots
            If two distinct poles are closer than ``CLUSTER_TOL``.
        """
        if "pf" in self._cache:
            return self._cache["pf"]
        for i, (c, _) in enumerate(self.poles):
            for d, _ in self.poles[i + 1:]:
                if abs(c - d) <= CLUSTER_TOL * max(1.0, abs(c)):
                    raise ClusteredRoots(f"poles {c} and {d} are not separated")
        qpart, _ = divmod(self.num, self.den) if self.deg_num >= self.deg_den else (poly([0.0]), None)
        terms = []
        for i, (c, m) in enumerate(self.poles):
            # (z-c)^m r(z) = num(z) / rest(z); Taylor-divide at c to order m-1
            ns = taylor_shift(self.num, c)[:m]
            ns = np.pad(ns, (0, m - ns.size))
            rs = taylor_shift(_factor_poly(self.poles, skip=i), c)[:m]
            rs = np.pad(rs, (0, m - rs.size))
            g = np.zeros(m, dtype=complex)
            for j in range(m):
                g[j] = (ns[j] - np.dot(rs[1:j + 1][::-1], g[:j])) / rs[0]
            # g[j] multiplies (z-c)^(j-m); store by increasing pole power
            terms.append(PoleTerm(c, m, tuple(g[::-1])))
        dec = Decomposition(trim(qpart), tuple(terms))
        self._cache["pf"] = dec
        return dec

    def laurent_at_infinity(self, n_terms: int) -> np.ndarray:
        """Coefficients ``c_j`` of ``r(z) = sum_j c_j z^(-j)`` for
        ``j = j0 .. j0 + n_terms - 1`` with ``j0 = deg t - deg s`` possibly
        negative; returned as a dict-like array pair ``(powers, coeffs)``."""
        ds, dt = self.deg_num, self.deg_den
        if ds < 0:
            return np.arange(n_terms), np.zeros(n_terms, dtype=complex)
        srev = np.array(self.num.coef[: ds + 1][::-1], dtype=complex)
        trev = np.array(self.den.coef[: dt + 1][::-1], dtype=complex)
        out = np.zeros(n_terms, dtype=complex)
        for n in range(n_terms):
            acc = srev[n] if n < srev.size else 0j
            for j in range(1, min(n, trev.size - 1) + 1):
                acc -= trev[j] * out[n - j]
            out[n] = acc / trev[0]
        powers = np.arange(dt - ds, dt - ds + n_terms)
        return powers, out

    def laurent_coefficient_at_infinity(self, power: int) -> complex:
        """Coefficient of ``z^(-power)`` in the expansion at infinity."""
        j0 = self.deg_den - self.deg_num
        n = power - j0 + 1
        if n <= 0:
            return 0j
        powers, coeffs = self.laurent_at_infinity(n)
        return complex(coeffs[-1])

    def singular_set(self) -> SingularSet:
        ord_inf = max(0, 4 + self.deg_num - self.deg_den) if self.deg_num >= 0 else 0
        return SingularSet(tuple((c, m) for c, m in self.poles), ord_inf)

    # --- I/O -------------------------------------------------------------
    def to_json_dict(self) -> dict:
        pairs = lambda p: [[float(c.real), float(c.imag)] for c in np.asarray(p.coef, dtype=complex)]
        return {"num": pairs(self.num), "den": pairs(self.den)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "RationalFunction":
        unpair = lambda v: [complex(a, b) for a, b in v]
        return cls.from_polynomials(poly(unpair(d["num"])), poly(unpair(d["den"])))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, s: str) -> "RationalFunction":
        return cls.from_json_dict(json.loads(s))


def partial_fractions(r: RationalFunction) -> Decomposition:
    return r.partial_fractions()


def laurent_at_infinity(r: RationalFunction, n_terms: int):
    return r.laurent_at_infinity(n_terms)


def singular_set(r: RationalFunction) -> SingularSet:
    return r.singular_set()
