"""Normal variational equation along the particular solutions.

The time-domain equation ``Q'' + a(t) Q = 0`` is pulled back by
``z = k cn(omega t, k)`` to a Fuchsian equation ``Q'' + p Q' + q Q = 0``
with singular points ``+-k``, ``+-ik'`` and infinity, then brought to the
reduced form ``W'' = r W``.  The Frobenius expansion at infinity decides
whether the local monodromy there carries a logarithm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NonIntegerExponentGap
from .ratfun import RationalFunction, SingularSet, poly
from .solutions import Branch, ParticularSolution

LOG_TOL = 1e-10
LOG_WARN = 1e-6
FROBENIUS_ORDER = 6


def a_coefficient(t, sol: ParticularSolution, xi: float):
    """``a(t, k)`` of ``Q'' + a Q = 0`` in closed form."""
    sn, cn, dn = sol._jacobi(t)
    w, k = sol.omega, sol.k
    base = (1.0 + k * w * cn) ** 2 - xi
    if sol.branch is Branch.C_less_1:
        return base + w**2 * dn**2
    return base - w**2 * k**2 * sn**2


def variational_rhs(t, y, sol: ParticularSolution, xi: float) -> np.ndarray:
    """Linearisation of the reduced canonical equations along the solution.

    ``y = (Q1, P1, Q2, P2)``; ``(Q2, P2)`` is the normal block.
    """
    Q1, P1, Q2, P2 = y
    if sol.k < 1.0 and np.any(sol.pole_distance(t) < 1e-6):
        from .errors import PoleProximity
        raise PoleProximity("variational equation evaluated at a pole")
    p1, S2, S3 = sol.phi(t)
    cos_q1, sin_q1 = -S2, S3
    C = sol.C
    cos2 = cos_q1**2 - sin_q1**2
    dP1 = 3.0 * (1.0 - C) * cos2 * Q1
    dP2 = (xi - p1**2 + 3.0 * (C - 1.0) * sin_q1**2) * Q2
    return np.array([P1, dP1, P2, dP2])


def hessian_fd(f, x, h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    n = x.size
    Hm = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            e_i = np.zeros(n); e_i[i] = h
            e_j = np.zeros(n); e_j[j] = h
            v = (f(x + e_i + e_j) - f(x + e_i - e_j) - f(x - e_i + e_j) + f(x - e_i - e_j)) / (4 * h * h)
            Hm[i, j] = Hm[j, i] = v
    return Hm


def normal_block(hess: np.ndarray, q: int, p: int) -> np.ndarray:
    """Matrix of the normal variational equation for the canonical pair
    ``(q, p)`` (indices into the Hessian), in the form ``d/dt (Q, P) = A (Q, P)``."""
    return np.array([[hess[p, q], hess[p, p]],
                     [-hess[q, q], -hess[q, p]]])


def _D_poles(k: float) -> list[tuple[complex, int]]:
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return [(complex(k), 1), (complex(-k), 1), (1j * kp, 1), (-1j * kp, 1)]


def algebraize(sol: ParticularSolution, xi: float):
    """Coefficients ``(p, q)`` of the NVE in the variable ``z = k cn(omega t)``."""
    k, w = sol.k, sol.omega
    kp2 = (1.0 - k) * (1.0 + k)
    # (k^2 - z^2)(z^2 + k'^2) = -prod(z - c)
    poles = _D_poles(k)
    p = RationalFunction.from_parts(-poly([0.0, 2 * k * k - 1.0, 0.0, -2.0]), poles)
    if sol.branch is Branch.C_less_1:
        c0 = 1.0 - xi + w * w * kp2
    else:
        c0 = 1.0 - xi - w * w * k * k
    q = RationalFunction.from_parts(-poly([c0, 2 * w, 2 * w * w]) / (w * w), poles)
    return p, q


def pullback_residual(t, sol: ParticularSolution, xi: float, p=None, q=None):
    """Chain-rule residuals ``p(z) zdot^2 - zddot`` and ``q(z) zdot^2 - a(t)``
    at ``z = k cn(omega t)``."""
    if p is None:
        p, q = algebraize(sol, xi)
    k, w = sol.k, sol.omega
    sn, cn, dn = sol._jacobi(t)
    z = k * cn
    zd = -k * w * sn * dn
    zdd = -k * w * w * cn * (dn**2 - k * k * sn**2)
    return p(z) * zd**2 - zdd, q(z) * zd**2 - a_coefficient(t, sol, xi)


def reduced_coefficient(p: RationalFunction, q: RationalFunction) -> RationalFunction:
    """``r = -q + p'/2 + p^2/4``."""
    return -q + 0.5 * p.deriv() + 0.25 * (p * p)


@dataclass(frozen=True, eq=False)
class FuchsianProblem:
    r: RationalFunction
    singular_set: SingularSet
    k: float | None = None
    omega: float | None = None
    xi: float | None = None
    branch: Branch | None = None
    C: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def finite_singularities(self) -> list[complex]:
        return [c for c, _ in self.singular_set.finite_points]

    @property
    def from_family(self) -> bool:
        return self.k is not None

    @property
    def scale(self) -> float:
        pts = self.finite_singularities
        return max([abs(c) for c in pts] + [1.0])

    def metadata(self) -> dict:
        return {"k": self.k, "omega": self.omega, "xi": self.xi,
                "branch": self.branch.value if self.branch else None, "C": self.C}

    def to_json_dict(self) -> dict:
        d = self.r.to_json_dict()
        d["metadata"] = self.metadata()
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "FuchsianProblem":
        r = RationalFunction.from_json_dict(d)
        meta = d.get("metadata") or {}
        br = meta.get("branch")
        return cls(r, r.singular_set(), meta.get("k"), meta.get("omega"), meta.get("xi"),
                   Branch(br) if br else None, meta.get("C"))

    @classmethod
    def from_rational(cls, r: RationalFunction) -> "FuchsianProblem":
        return cls(r, r.singular_set())


def reduce(p: RationalFunction, q: RationalFunction, **meta) -> FuchsianProblem:
    r = reduced_coefficient(p, q)
    return FuchsianProblem(r, r.singular_set(), **meta)


def satellite_problem(C: float, xi: float, k: float) -> FuchsianProblem:
    """Reduced NVE ``W'' = r W`` for the family at ``(C, xi, k)``."""
    sol = ParticularSolution.from_params(k, C)
    p, q = algebraize(sol, xi)
    return reduce(p, q, k=sol.k, omega=sol.omega, xi=float(xi), branch=sol.branch, C=float(C))


def multiplier_fourth_power(k: float) -> RationalFunction:
    """``R^4`` for ``W = R Q`` with ``R = [(k^2 - z^2)(k'^2 + z^2)]^(1/4)``,
    i.e. ``exp(-2 int p)`` up to a constant."""
    kp2 = (1.0 - k) * (1.0 + k)
    return RationalFunction(poly([-1.0]) * poly([-k * k, 0, 1]) * poly([kp2, 0, 1]), ())


@dataclass(frozen=True)
class FrobeniusData:
    exponents: tuple  # (rho_minus, rho_plus)
    f: tuple  # f_0 = 1, f_1, ..., f_order
    g: tuple  # coefficients of 1/f^2
    gap: int
    log_coefficient: complex
    log_present: bool
    near_threshold: bool

    @property
    def f1(self):
        return self.f[1]

    @property
    def f2(self):
        return self.f[2]

    @property
    def f3(self):
        return self.f[3]

    @property
    def g3(self):
        return self.g[3]


def frobenius_infinity(fp: FuchsianProblem, order: int = FROBENIUS_ORDER) -> FrobeniusData:
    """Frobenius solution at ``zeta = 1/z = 0`` for the larger exponent.

    With ``zeta^-4 r(1/zeta) = sum_n c_(n+2) zeta^(n-2)`` the recurrence is
    ``f_n [(n+rho)(n+rho+1) - c_2] = sum_(j=1..n) c_(j+2) f_(n-j)``.
    The logarithm in the second solution is governed by the coefficient
    of ``zeta^m`` in ``1/f^2`` (``m`` the exponent gap).
    """
    r = fp.r
    if r.deg_num - r.deg_den > -2:
        raise NonIntegerExponentGap("infinity is not a regular singular point")
    c = [r.laurent_coefficient_at_infinity(j) for j in range(order + 3)]
    c2 = c[2]
    disc = complex(np.sqrt(1.0 + 4.0 * c2))
    gap_f = disc.real if abs(disc.imag) < 1e-9 else float("nan")
    gap = round(gap_f) if not math.isnan(gap_f) else None
    if gap is None or abs(gap_f - gap) > 1e-9 or gap < 0:
        raise NonIntegerExponentGap(f"exponent difference {disc} is not an integer")
    rho_p = (-1.0 + gap) / 2.0
    rho_m = (-1.0 - gap) / 2.0
    f = [1.0 + 0j]
    for n in range(1, order + 1):
        lhs = (n + rho_p) * (n + rho_p + 1) - c2
        acc = sum(c[j + 2] * f[n - j] for j in range(1, n + 1))
        f.append(acc / lhs)
    # 1/f^2 as a power series
    f2 = np.convolve(f, f)[: order + 1]
    g = [1.0 + 0j]
    for n in range(1, order + 1):
        g.append(-sum(f2[j] * g[n - j] for j in range(1, n + 1)))
    logc = g[gap] if 0 < gap <= order else 0j
    norm = fp.omega**3 if fp.omega else 1.0
    size = abs(logc) * norm
    present = size > LOG_TOL
    near = LOG_TOL < size < LOG_WARN
    if near:
        warnings.warn(f"log coefficient {size:.3e} is close to the decision threshold",
                      RuntimeWarning, stacklevel=2)
    return FrobeniusData((rho_m, rho_p), tuple(f), tuple(g), gap, logc, present, near)
