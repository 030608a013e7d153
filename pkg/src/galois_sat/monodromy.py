"""Numerical monodromy of ``W'' = r W`` by transport along polygonal loops.

A fundamental matrix ``Y`` of the companion system ``Y' = [[0, 1], [r, 0]] Y``
starts at the identity at the base point and is continued along a closed
polyline; its end value is the monodromy matrix of the loop.  Loops are
composed left to right in time, so with this convention
``M(gamma then sigma) = M(sigma) @ M(gamma)``.

Loops around finite singularities are a radial approach from the base
point, a 32-gon of radius ``min(gap)/3`` traversed counterclockwise and
the way back.  The loop around infinity runs out along a ray to a circle
of radius ``10 max|c|`` and traverses it clockwise in the ``z``-plane,
which is counterclockwise as seen from infinity.
"""

from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._ode import integrate_path
from .errors import ClearanceViolation
from .kovacic import thread_cap
from .nve import FuchsianProblem, satellite_problem
from .ratfun import RationalFunction

INFINITY = "inf"
N_GON = 32
CLEARANCE = 1e-3
TRANSPORT_RTOL = 1e-12
DET_TOL = 1e-8
UNIPOTENT_TRACE_TOL = 1e-6
NONTRIVIAL_TOL = 1e-3
TRIVIAL_TOL = 1e-6
EIGVEC_TOL = 1e-6


def _seg_dist(a: complex, b: complex, c: complex) -> float:
    """Distance from ``c`` to the segment ``[a, b]``."""
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(c - a)
    s = min(1.0, max(0.0, ((c - a) * d.conjugate()).real / L2))
    return abs(a + s * d - c)


def winding_number(vertices, c: complex) -> int:
    """Winding number of the closed polyline about ``c``."""
    total = 0.0
    for a, b in zip(vertices[:-1], vertices[1:]):
        total += cmath.phase((b - c) / (a - c))
    return int(round(total / (2 * math.pi)))


@dataclass(frozen=True)
class Loop:
    base_point: complex
    vertices: tuple
    target: object  # complex singular point or INFINITY
    orientation: str = "counterclockwise"

    def reversed(self) -> "Loop":
        return Loop(self.base_point, tuple(reversed(self.vertices)), self.target, "clockwise")

    def check(self, singular_points, clearance: float) -> None:
        """Validate clearance and winding numbers.

        Raises
        ------
        ClearanceViolation
            If a segment passes within ``clearance`` of a singular point,
            or the loop does not wind once around its target only.
        """
        v = self.vertices
        if abs(v[0] - v[-1]) > 1e-14 * max(1.0, abs(v[0])):
            raise ClearanceViolation("loop is not closed")
        for c in singular_points:
            dmin = min(_seg_dist(a, b, c) for a, b in zip(v[:-1], v[1:]))
            if dmin <= clearance:
                raise ClearanceViolation(f"loop passes within {dmin:.3e} of singularity {c}")
        sign = 1 if self.orientation == "counterclockwise" else -1
        for c in singular_points:
            w = winding_number(v, c)
            if self.target == INFINITY:
                want = -sign
            else:
                want = sign if abs(c - self.target) < 1e-12 * max(1.0, abs(c)) else 0
            if w != want:
                raise ClearanceViolation(f"winding number {w} about {c}, expected {want}")


def _gap(points, base: complex) -> float:
    pts = list(points)
    d = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]]
    d += [abs(c - base) for c in pts]
    return min(d)


def loop_around(c: complex, singular_points, base_point: complex = 0j,
                radius: float | None = None, n: int = N_GON) -> Loop:
    """Radial approach, ``n``-gon about ``c`` counterclockwise, return."""
    if radius is None:
        radius = _gap(singular_points, base_point) / 3.0
    theta = cmath.phase(base_point - c)
    circ = [c + radius * cmath.exp(1j * (theta + 2 * math.pi * j / n)) for j in range(n + 1)]
    verts = (base_point, *circ, base_point)
    return Loop(base_point, verts, c)


def infinity_ray_angle(singular_points, base_point: complex = 0j) -> float:
    """Ray direction for the infinity loop: the middle of the angular gap
    that wraps past ``arg = pi``, so that the finite loops taken in
    ascending argument compose to the big circle."""
    args = sorted(cmath.phase(c - base_point) for c in singular_points)
    lo, hi = args[0], args[-1]
    return 0.5 * (hi + lo + 2 * math.pi)


def loop_infinity(singular_points, base_point: complex = 0j, radius: float | None = None,
                  n: int = 2 * N_GON, angle: float | None = None) -> Loop:
    """Loop encircling infinity counterclockwise (clockwise big circle)."""
    if radius is None:
        radius = 10.0 * max(abs(c - base_point) for c in singular_points)
    if angle is None:
        angle = infinity_ray_angle(singular_points, base_point)
    circ = [base_point + radius * cmath.exp(1j * (angle - 2 * math.pi * j / n)) for j in range(n + 1)]
    return Loop(base_point, (base_point, *circ, base_point), INFINITY)


@dataclass
class MonodromyMatrix:
    entries: np.ndarray
    tag: str = ""

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.entries)

    def classify(self) -> str:
        """``identity``, ``unipotent`` (nontrivial) or ``other``."""
        dist = float(np.linalg.norm(self.entries - np.eye(2)))
        if dist < TRIVIAL_TOL:
            return "identity"
        if abs(self.trace - 2.0) < UNIPOTENT_TRACE_TOL:
            if dist <= NONTRIVIAL_TOL:
                warnings.warn(f"||M - I|| = {dist:.3e} between trivial and nontrivial thresholds",
                              RuntimeWarning, stacklevel=2)
            return "unipotent"
        return "other"

    def to_dict(self) -> dict:
        E = self.entries
        return {"tag": self.tag,
                "re": E.real.tolist(), "im": E.imag.tolist(),
                "trace": [self.trace.real, self.trace.imag],
                "det": [self.det.real, self.det.imag],
                "eigenvalues": [[float(v.real), float(v.imag)] for v in self.eigenvalues],
                "classification": self.classify()}


def _fast_eval(rf: RationalFunction):
    num = [complex(c) for c in reversed(rf.num.coef)]
    poles = [(complex(c), int(m)) for c, m in rf.poles]

    def f(z: complex) -> complex:
        acc = 0j
        for a in num:
            acc = acc * z + a
        for c, m in poles:
            acc /= (z - c) ** m
        return acc

    return f


def transport_system(A, loop: Loop, singular_points=(), tol: float = TRANSPORT_RTOL,
                     clearance: float | None = None, tag: str = "") -> MonodromyMatrix:
    """Monodromy of ``Y' = A(z) Y`` (``A`` returns a 2x2 array) along ``loop``."""
    pts = list(singular_points)
    if pts:
        scale = max([abs(c) for c in pts] + [1.0])
        loop.check(pts, CLEARANCE * scale if clearance is None else clearance)

    def f(z, y):
        return (A(z) @ y.reshape(2, 2)).ravel()

    sol = integrate_path(f, np.eye(2, dtype=complex).ravel(), loop.vertices,
                         rtol=tol, atol=tol, dense=False)
    return MonodromyMatrix(sol.y_end.reshape(2, 2), tag)


def transport(fp: FuchsianProblem, loop: Loop, tol: float = TRANSPORT_RTOL,
              clearance: float | None = None) -> MonodromyMatrix:
    """Monodromy of ``W'' = r W`` along ``loop``; ``det M = 1``."""
    r = _fast_eval(fp.r)
    pts = fp.finite_singularities
    scale = fp.scale
    loop.check(pts, CLEARANCE * scale if clearance is None else clearance)

    def f(z, y):
        rz = r(z)
        return np.array([y[2], y[3], rz * y[0], rz * y[1]])

    sol = integrate_path(f, np.eye(2, dtype=complex).ravel(), loop.vertices,
                         rtol=tol, atol=tol, dense=False)
    tag = "inf" if loop.target == INFINITY else _fmt_point(loop.target)
    M = MonodromyMatrix(sol.y_end.reshape(2, 2), tag)
    if abs(M.det - 1.0) > DET_TOL:
        warnings.warn(f"det M - 1 = {abs(M.det - 1.0):.3e}", RuntimeWarning, stacklevel=2)
    return M


def _fmt_point(c) -> str:
    c = complex(c)
    return f"{c.real:+.6g}{c.imag:+.6g}i"


def local_monodromy_infinity(fp: FuchsianProblem, tol: float = TRANSPORT_RTOL,
                             base_point: complex = 0j) -> tuple[MonodromyMatrix, str]:
    M = transport(fp, loop_infinity(fp.finite_singularities, base_point), tol)
    return M, M.classify()


def ordered_singularities(points, base_point: complex = 0j) -> list[complex]:
    """Finite singular points by ascending argument about ``base_point``."""
    return sorted(points, key=lambda c: cmath.phase(c - base_point))


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)


def eigenvector_alignment(mats) -> float:
    """Smallest, over eigenvectors ``v`` of the given matrices, of the largest
    ``sin`` of the angle between ``v`` and ``M v`` over all ``M``.  Near zero
    means a common eigenvector (reducible monodromy)."""
    best = math.inf
    for M in mats:
        w, V = np.linalg.eig(M)
        if abs(w[0] - w[1]) < 1e-6:
            continue  # repeated eigenvalue: eigenvector ill-conditioned
        for j in range(2):
            v = V[:, j] / np.linalg.norm(V[:, j])
            worst = 0.0
            for N in mats:
                u = N @ v
                nu = np.linalg.norm(u)
                if nu == 0:
                    continue
                s = abs(v[0] * u[1] - v[1] * u[0]) / nu
                worst = max(worst, s)
            best = min(best, worst)
    return float(best)


@dataclass
class GroupReport:
    finite: list  # MonodromyMatrix per singularity, ascending argument
    infinity: MonodromyMatrix
    sphere_residual: float
    commutator_norms: dict
    alignment: float
    det_residual: float
    params: dict = field(default_factory=dict)

    @property
    def irreducible(self) -> bool:
        return bool(self.alignment > EIGVEC_TOL)

    @property
    def non_abelian(self) -> bool:
        return bool(max(self.commutator_norms.values()) > NONTRIVIAL_TOL)

    def to_dict(self) -> dict:
        return {"schema": 1, "params": self.params,
                "singularities": [m.to_dict() for m in self.finite] + [self.infinity.to_dict()],
                "relations": {"sphere_residual": self.sphere_residual,
                              "det_residual": self.det_residual,
                              "commutators": self.commutator_norms,
                              "eigenvector_alignment": self.alignment,
                              "irreducible": self.irreducible,
                              "non_abelian": self.non_abelian}}


def all_loops(fp: FuchsianProblem, base_point: complex = 0j) -> list[Loop]:
    pts = ordered_singularities(fp.finite_singularities, base_point)
    loops = [loop_around(c, pts, base_point) for c in pts]
    loops.append(loop_infinity(pts, base_point))
    return loops


def group_relations(fp: FuchsianProblem, tol: float = TRANSPORT_RTOL,
                    base_point: complex = 0j, threads: int | None = None) -> GroupReport:
    """Transport around every singular point and check the relations.

    With finite loops ``gamma_1 .. gamma_n`` in ascending argument and the
    loop at infinity, ``gamma_1 ... gamma_n gamma_inf`` is null-homotopic,
    hence ``M_inf @ M_n @ ... @ M_1 = I``.
    """
    loops = all_loops(fp, base_point)
    threads = thread_cap() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            mats = list(ex.map(lambda lp: transport(fp, lp, tol), loops))
    else:
        mats = [transport(fp, lp, tol) for lp in loops]
    fin, inf = mats[:-1], mats[-1]
    prod = np.eye(2, dtype=complex)
    for M in fin:
        prod = M.entries @ prod
    prod = inf.entries @ prod
    sphere = float(np.linalg.norm(prod - np.eye(2)))
    comms = {}
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comms[f"{mats[i].tag}|{mats[j].tag}"] = float(
                np.linalg.norm(commutator(mats[i].entries, mats[j].entries) - np.eye(2)))
    align = eigenvector_alignment([m.entries for m in mats])
    det_res = max(abs(m.det - 1.0) for m in mats)
    return GroupReport(fin, inf, sphere, comms, align, det_res, fp.metadata())


def heteroclinic_diagnostic(C: float, xi: float, ks, tol: float = TRANSPORT_RTOL) -> list[dict]:
    """Traces of the finite monodromies and of ``M_inf`` as ``k -> 1``.

    A diagnostic only: no quantitative claim is attached to the limit.
    """
    out = []
    for k in ks:
        rep = group_relations(satellite_problem(C, xi, k), tol)
        out.append({"k": float(k),
                    "traces": [[m.trace.real, m.trace.imag] for m in rep.finite],
                    "infinity_trace": [rep.infinity.trace.real, rep.infinity.trace.imag],
                    "infinity_class": rep.infinity.classify()})
    return out


def expm_fixture(Cmat) -> np.ndarray:
    """``exp(2 pi i C)``, the monodromy of ``Y' = C Y / z`` about ``0``."""
    return scipy.linalg.expm(2j * math.pi * np.asarray(Cmat, dtype=complex))
