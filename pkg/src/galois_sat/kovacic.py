"""Kovacic's algorithm, cases I and II, for Fuchsian ``W'' = r W``.

Exponent sets are built from the leading Laurent coefficients at every
singular point; rational square roots are snapped to exact fractions so
that the candidate enumeration is discrete.  For each admissible
candidate the monic polynomial condition is a linear system in the
non-leading coefficients, solved by least squares on the numerator
polynomial over a common factored denominator.

The log-derivative that Kovacic calls ``omega`` is named ``lodd`` here to
keep it apart from the pendulum frequency.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import Polynomial

from .errors import NonIntegerExponentGap, NotFuchsian
from .nve import FuchsianProblem, frobenius_infinity
from .ratfun import RationalFunction, _factor_poly, _match, poly, snap_rational

DEFAULT_TOL = 1e-9
SNAP_TOL = 1e-9
SNAP_MAX_DEN = 64


class Classification(enum.Enum):
    Reducible = "Reducible"
    Case2Solvable = "Case2Solvable"
    SL2 = "SL2"
    Inconclusive = "Inconclusive"


VERDICTS = {
    Classification.Reducible: "Reducible - Galois group triangular; necessary condition satisfied",
    Classification.Case2Solvable: "Case2Solvable - identity component Abelian; necessary condition satisfied",
    Classification.SL2: "SL2 - necessary condition for integrability violated",
    Classification.Inconclusive: "Inconclusive - cases I and II fail but no logarithm at infinity",
}


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("GALOIS_SAT_THREADS", "1")))
    except ValueError:
        return 1


def _snap(x: complex):
    """Exact fraction if ``x`` is real and within ``SNAP_TOL`` of ``p/q``."""
    return snap_rational(x, SNAP_TOL, SNAP_MAX_DEN)


def _sqrt(x):
    if isinstance(x, Fraction) and x >= 0:
        n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if n * n == x.numerator and d * d == x.denominator:
            return Fraction(n, d)
    return _snap(complex(np.sqrt(complex(x))))


def _is_integer(x) -> bool:
    if isinstance(x, Fraction):
        return x.denominator == 1
    x = complex(x)
    return abs(x.imag) < SNAP_TOL and abs(x.real - round(x.real)) < SNAP_TOL


def _as_int(x) -> int:
    return int(round(complex(x).real))


@dataclass(frozen=True)
class SingularData:
    point: complex | None  # None for infinity
    order: int
    a: object  # Fraction or complex
    delta: object  # Fraction or complex


@dataclass(frozen=True)
class ExponentData:
    finite: tuple  # SingularData per finite pole
    infinity: SingularData

    def case1_sets(self):
        def E(sd: SingularData, inf: bool):
            if sd.order < 2:
                return (Fraction(0), Fraction(1)) if inf else (Fraction(1),)
            vals = {_key(v): v for v in (_half(1 + sd.delta), _half(1 - sd.delta))}
            return tuple(sorted(vals.values(), key=_sort_key))
        return E(self.infinity, True), tuple(E(sd, False) for sd in self.finite)

    def case2_sets(self):
        def E(sd: SingularData, inf: bool):
            if sd.order < 2:
                return (0, 2, 4) if inf else (4,)
            vals = set()
            for v in (2, 2 * (1 + sd.delta), 2 * (1 - sd.delta)):
                if _is_integer(v):
                    vals.add(_as_int(v))
            return tuple(sorted(vals))
        return E(self.infinity, True), tuple(E(sd, False) for sd in self.finite)


def _half(x):
    return x / 2 if isinstance(x, Fraction) else _snap(complex(x) / 2)


def _key(v):
    c = complex(v)
    return (round(c.real, 9), round(c.imag, 9))


def _sort_key(v):
    c = complex(v)
    return (c.real, c.imag)


def exponent_data(fp: FuchsianProblem) -> ExponentData:
    """Leading coefficients ``a_c``, ``a_inf`` and ``Delta = sqrt(1 + 4a)``.

    Raises
    ------
    NotFuchsian
        If some singular point has order greater than two.
    """
    ss = fp.singular_set
    if not ss.fuchsian:
        raise NotFuchsian("Kovacic cases I/II here require a Fuchsian equation")
    dec = fp.r.partial_fractions()
    finite = []
    for c, m in ss.finite_points:
        t = dec.term_at(c)
        a = _snap(t.a) if m == 2 else Fraction(0)
        finite.append(SingularData(c, m, a, _sqrt(1 + 4 * a)))
    if ss.order_infinity == 2:
        a_inf = _snap(fp.r.laurent_coefficient_at_infinity(2))
    else:
        a_inf = Fraction(0)
    inf = SingularData(None, ss.order_infinity, a_inf, _sqrt(1 + 4 * a_inf))
    return ExponentData(tuple(finite), inf)


def _over_common(rfs):
    """Numerators of ``rfs`` over one common factored denominator."""
    poles: list[list] = []
    for rf in rfs:
        for c, m in rf.poles:
            i = _match(c, poles)
            if i >= 0:
                poles[i][1] = max(poles[i][1], m)
            else:
                poles.append([c, m])
    poles = [tuple(p) for p in poles]
    nums = []
    for rf in rfs:
        extra = []
        for c, m in poles:
            i = _match(c, rf.poles)
            extra.append((c, m - (rf.poles[i][1] if i >= 0 else 0)))
        nums.append(rf.num * _factor_poly(extra))
    return nums, _factor_poly(poles)


def _monomial(j: int) -> Polynomial:
    c = np.zeros(j + 1, dtype=complex)
    c[j] = 1.0
    return Polynomial(c)


def _vec(p: Polynomial, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    c = np.asarray(p.coef, dtype=complex)
    out[: min(n, c.size)] = c[:n]
    return out


@dataclass(frozen=True)
class PolySolve:
    P: Polynomial
    residual: float


def solve_monic(coeff_rfs, degree: int) -> PolySolve:
    """Monic ``P`` of the given degree minimising the linear operator
    ``sum_i A_i P^(i)`` (``coeff_rfs[i] = A_i``; ``A_top = 1`` implied).

    The residual is the norm of the operator's numerator divided by the
    sum of the norms of its individual terms: a dimensionless measure of
    cancellation, zero for an exact solution.
    """
    order = len(coeff_rfs)
    rfs = list(coeff_rfs) + [RationalFunction.constant(1.0)]
    nums, den = _over_common(rfs)

    def apply(P: Polynomial) -> Polynomial:
        out = poly([0.0])
        for i, N in enumerate(nums):
            Pi = P.deriv(i) if i else P
            out = out + N * Pi
        return out

    cols = [apply(_monomial(j)) for j in range(degree + 1)]
    n = max(c.coef.size for c in cols)
    M = np.column_stack([_vec(c, n) for c in cols])
    target = -M[:, degree]
    if degree > 0:
        scale = np.linalg.norm(M[:, :degree], axis=0)
        scale[scale == 0] = 1.0
        g, *_ = np.linalg.lstsq(M[:, :degree] / scale, target, rcond=None)
        g = g / scale
    else:
        g = np.zeros(0, dtype=complex)
    coef = np.concatenate([g, [1.0]])
    res_vec = M @ coef
    denom = sum(abs(cf) * np.linalg.norm(M[:, j]) for j, cf in enumerate(coef))
    residual = float(np.linalg.norm(res_vec) / denom) if denom > 0 else 0.0
    return PolySolve(Polynomial(coef.astype(complex)), residual)


def _w_of(e_fin, points, factor=1.0) -> RationalFunction:
    w = RationalFunction.constant(0.0)
    for e, c in zip(e_fin, points):
        if e != 0:
            w = w + RationalFunction.from_parts(poly([factor * complex(e)]), [(c, 1)])
    return w


@dataclass
class Candidate:
    e: tuple  # (e_inf, e_c1, ...)
    d: int
    residual: float | None = None
    P: Polynomial | None = None

    def to_dict(self) -> dict:
        return {"e": [_fmt_exp(v) for v in self.e], "d": self.d,
                "residual": self.residual}


def _fmt_exp(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, int):
        return v
    c = complex(v)
    return [c.real, c.imag]


@dataclass
class CaseResult:
    case: int
    found: bool
    candidates: list
    solution: Candidate | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        sol = self.solution
        out = {"found": self.found, "n_candidates": len(self.candidates)}
        if sol is not None:
            out["candidate"] = sol.to_dict()
            out["P"] = [[float(c.real), float(c.imag)] for c in sol.P.coef]
            out["residual"] = sol.residual
        out.update(self.extra)
        return out


def _enumerate(E_inf, E_fin, dfun):
    out = []
    for e in itertools.product(E_inf, *E_fin):
        d = dfun(e)
        if _is_integer(d) and complex(d).real > -0.5:
            out.append(Candidate(tuple(e), _as_int(d)))
    return out


def _map(fn, items, threads):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def case1_candidates(fp: FuchsianProblem) -> list[Candidate]:
    ed = exponent_data(fp)
    E_inf, E_fin = ed.case1_sets()
    return _enumerate(E_inf, E_fin, lambda e: 1 - sum(e))


def case2_candidates(fp: FuchsianProblem) -> list[Candidate]:
    ed = exponent_data(fp)
    E_inf, E_fin = ed.case2_sets()
    return _enumerate(E_inf, E_fin, lambda e: Fraction(2) - Fraction(sum(e), 2))


def case1(fp: FuchsianProblem, tol: float = DEFAULT_TOL, threads: int | None = None) -> CaseResult:
    """Search for an exponential solution ``W = P exp(int lodd)``.

    ``P`` solves ``P'' + 2 lodd P' + (lodd' + lodd^2 - r) P = 0``.
    """
    threads = thread_cap() if threads is None else threads
    cands = case1_candidates(fp)
    points = fp.finite_singularities
    r = fp.r

    def run(cand: Candidate) -> Candidate:
        lodd = _w_of(cand.e[1:], points)
        A1 = 2.0 * lodd
        A0 = lodd.deriv() + lodd * lodd - r
        sol = solve_monic([A0, A1], cand.d)
        return Candidate(cand.e, cand.d, sol.residual, sol.P)

    done = _map(run, cands, threads)
    hits = [c for c in done if c.residual < tol]
    best = min(hits, key=lambda c: (c.residual, c.d)) if hits else None
    extra = {}
    if best is not None:
        extra["omega_kovacic"] = {"poles": [[p.real, p.imag] for p in points],
                                  "residues": [_fmt_exp(v) for v in best.e[1:]]}
    return CaseResult(1, best is not None, done, best, extra)


def case2(fp: FuchsianProblem, tol: float = DEFAULT_TOL, threads: int | None = None) -> CaseResult:
    """Search for ``W = exp(int lodd)`` with ``lodd`` quadratic over C(z).

    ``P`` solves the third-order condition with ``theta = 1/2 sum e_c/(z-c)``;
    on success ``psi = theta + P'/P`` and ``lodd`` is a root of
    ``lodd^2 - psi lodd + psi'/2 + psi^2/2 - r = 0``.
    """
    threads = thread_cap() if threads is None else threads
    cands = case2_candidates(fp)
    points = fp.finite_singularities
    r = fp.r
    rp = r.deriv()

    def run(cand: Candidate) -> Candidate:
        th = _w_of(cand.e[1:], points, 0.5)
        thp = th.deriv()
        B2 = 3.0 * th
        B1 = 3.0 * th * th + 3.0 * thp - 4.0 * r
        B0 = thp.deriv() + 3.0 * th * thp + th * th * th - 4.0 * r * th - 2.0 * rp
        sol = solve_monic([B0, B1, B2], cand.d)
        return Candidate(cand.e, cand.d, sol.residual, sol.P)

    done = _map(run, cands, threads)
    hits = [c for c in done if c.residual < tol]
    best = min(hits, key=lambda c: (c.residual, c.d)) if hits else None
    extra = {}
    if best is not None:
        th = _w_of(best.e[1:], points, 0.5)
        extra["theta_residues"] = [_fmt_exp(0.5 * complex(v)) for v in best.e[1:]]
        extra["omega_kovacic"] = "root of lodd^2 - psi*lodd + psi'/2 + psi^2/2 - r, psi = theta + P'/P"
    return CaseResult(2, best is not None, done, best, extra)


def psi_function(fp: FuchsianProblem, cand: Candidate):
    """``psi = theta + P'/P`` for a successful case II candidate."""
    th = _w_of(cand.e[1:], fp.finite_singularities, 0.5)

    def psi(z):
        z = np.asarray(z, dtype=complex)
        return th(z) + cand.P.deriv()(z) / cand.P(z)

    return psi


def case1_solution_residual(fp: FuchsianProblem, cand: Candidate, z) -> np.ndarray:
    """Relative residual of ``W'' - r W`` for ``W = P exp(int lodd)`` via the
    logarithmic derivative ``u = W'/W = lodd + P'/P``: ``u' + u^2 - r``."""
    z = np.asarray(z, dtype=complex)
    lodd = _w_of(cand.e[1:], fp.finite_singularities)
    P, dP, ddP = cand.P, cand.P.deriv(), cand.P.deriv(2)
    u = lodd(z) + dP(z) / P(z)
    du = lodd.deriv()(z) + ddP(z) / P(z) - (dP(z) / P(z)) ** 2
    rv = fp.r(z)
    return np.abs(du + u * u - rv) / (np.abs(du) + np.abs(u) ** 2 + np.abs(rv))


def case2_quadratic_residual(fp: FuchsianProblem, cand: Candidate, z, h: float = 1e-5):
    """Check that a root ``lodd`` of the case II quadratic gives a solution:
    ``lodd' + lodd^2 - r`` relative to its terms, derivative by central
    differences along the real direction."""
    z = np.asarray(z, dtype=complex)
    psi = psi_function(fp, cand)

    def lodd(x):
        ps = psi(x)
        dps = (psi(x + h) - psi(x - h)) / (2 * h)
        disc = ps * ps - 4 * (0.5 * dps + 0.5 * ps * ps - fp.r(x))
        return 0.5 * (ps + np.sqrt(disc))

    # follow the same square-root branch locally by evaluating near z only
    L = lodd(z)
    dL = (lodd(z + h) - lodd(z - h)) / (2 * h)
    rv = fp.r(z)
    return np.abs(dL + L * L - rv) / (np.abs(dL) + np.abs(L) ** 2 + np.abs(rv))


@dataclass
class KovacicReport:
    case1: CaseResult
    case2: CaseResult | None
    classification: Classification
    log_present: bool | None
    g3: complex | None
    params: dict

    @property
    def verdict(self) -> str:
        return VERDICTS[self.classification]

    def to_dict(self) -> dict:
        cands = [c.to_dict() | {"case": 1} for c in self.case1.candidates]
        if self.case2 is not None:
            cands += [c.to_dict() | {"case": 2} for c in self.case2.candidates]
        g3 = None if self.g3 is None else [float(self.g3.real), float(self.g3.imag)]
        return {"schema": 1, "params": self.params,
                "case1": self.case1.to_dict(),
                "case2": self.case2.to_dict() if self.case2 else None,
                "classification": self.classification.value,
                "verdict": self.verdict,
                "log_at_infinity": self.log_present, "g3": g3,
                "candidates": cands}


def classify(fp: FuchsianProblem, tol: float = DEFAULT_TOL, threads: int | None = None) -> KovacicReport:
    """Decide the Galois group type from cases I, II and the logarithm at
    infinity (a nontrivial unipotent local monodromy rules out the
    dihedral and finite types)."""
    c1 = case1(fp, tol, threads)
    c2 = None
    log_present, g3 = None, None
    try:
        fr = frobenius_infinity(fp)
        log_present, g3 = fr.log_present, complex(fr.log_coefficient)
    except NonIntegerExponentGap:  # no log criterion available
        pass
    if c1.found:
        cls = Classification.Reducible
    else:
        c2 = case2(fp, tol, threads)
        if c2.found:
            cls = Classification.Case2Solvable
        elif log_present:
            cls = Classification.SL2
        else:
            cls = Classification.Inconclusive
    return KovacicReport(c1, c2, cls, log_present, g3, fp.metadata())
