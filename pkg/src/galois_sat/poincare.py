"""Poincare sections of the reduced two-degree-of-freedom system.

The section is the plane ``q2 = pi/2`` crossed with ``p2 > 0``.  There
``cos q2 = 0`` so the magnetic term drops out of the energy equation and
``p2`` follows from ``(q1, p1, h)`` alone.  Seeds with ``p2 = 0`` lie on
the invariant plane of the particular solutions; they never cross and
are returned as time-sampled planar curves instead.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._ode import _solve, check_tol
from .errors import CoordinateSingularity, EnergyInfeasible, EscapeDetected, StepFailure
from .kovacic import thread_cap
from .reduction import H_reduced, reduced_rhs

HALF_PI = 0.5 * math.pi
ESCAPE = 1e3
SING_GUARD = 1e-6
SECTION_TOL = 1e-10
PLANAR_DISC = 1e-12
CHUNK = 200.0


@dataclass(frozen=True)
class SectionSpec:
    C: float = 1.7
    xi: float = 0.1
    h: float = 0.5
    seeds: tuple = ((0.0, 1.0), (0.3, 1.0), (0.6, 1.0), (0.9, 1.0), (0.0, 0.5))
    max_crossings: int = 100
    t_max: float = 5000.0
    planar_samples: int = 200
    planar_time: float = 50.0

    def to_dict(self) -> dict:
        return {"C": self.C, "xi": self.xi, "h": self.h,
                "seeds": [list(s) for s in self.seeds],
                "max_crossings": self.max_crossings, "t_max": self.t_max,
                "section": "q2 = pi/2, p2 > 0"}


def _disc(q1, p1, spec: SectionSpec) -> float:
    return 2.0 * (spec.h - 0.5 * p1 * p1 + p1 - 1.5 * (spec.C - 1.0) * math.sin(q1) ** 2)


def seed_momentum(q1: float, p1: float, spec: SectionSpec) -> float:
    """``p2 >= 0`` on the section from the energy equation.

    Raises
    ------
    EnergyInfeasible
        If the level ``h`` is not reachable at ``(q1, p1)``.
    """
    d = _disc(q1, p1, spec)
    if d < -1e-12:
        raise EnergyInfeasible(f"no real p2 at q1={q1}, p1={p1}, h={spec.h}")
    return math.sqrt(max(d, 0.0))


@dataclass
class SeedResult:
    seed_id: int
    seed: tuple
    status: str  # ok | planar | escaped | coordinate_singularity | max_time
    points: np.ndarray  # rows (q1, p1, t)
    planar: bool = False
    max_plane_defect: float = 0.0
    section_residual: float = 0.0
    energy_residual: float = 0.0


@dataclass
class SectionResult:
    spec: SectionSpec
    seeds: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            meta = self.spec.to_dict() | {"schema": 1,
                                          "status": {s.seed_id: s.status for s in self.seeds}}
            fh.write("# " + json.dumps(meta) + "\n")
            w = csv.writer(fh)
            w.writerow(["seed_id", "crossing_index", "q1", "p1", "t"])
            for s in self.seeds:
                for i, (q1, p1, t) in enumerate(s.points):
                    w.writerow([s.seed_id, i, f"{q1:.17g}", f"{p1:.17g}", f"{t:.17g}"])


def _wrap(q: float) -> float:
    return math.atan2(math.sin(q), math.cos(q))


def _planar(seed_id, q1, p1, spec: SectionSpec, tol: float) -> SeedResult:
    x0 = np.array([q1, HALF_PI, p1, 0.0])
    t = np.linspace(0.0, spec.planar_time, spec.planar_samples)
    sol = _solve(lambda s, y: reduced_rhs(y, spec.C, spec.xi), (0.0, spec.planar_time), x0,
                 tol, tol, False, t_eval=t)
    y = sol.y
    defect = float(max(np.max(np.abs(y[1] - HALF_PI)), np.max(np.abs(y[3]))))
    pts = np.column_stack([[_wrap(v) for v in y[0]], y[2], sol.t])
    E = [H_reduced(y[:, j], spec.C, spec.xi) for j in range(y.shape[1])]
    return SeedResult(seed_id, (q1, p1), "planar", pts, True, defect, 0.0,
                      float(np.max(np.abs(np.asarray(E) - spec.h))))


def _one_seed(seed_id: int, q1: float, p1: float, spec: SectionSpec, tol: float,
              strict: bool) -> SeedResult:
    if _disc(q1, p1, spec) < PLANAR_DISC:
        seed_momentum(q1, p1, spec)  # raises if infeasible
        return _planar(seed_id, q1, p1, spec, tol)
    p2 = seed_momentum(q1, p1, spec)
    C, xi = spec.C, spec.xi

    def f(t, y):
        return reduced_rhs(y, C, xi)

    def cross(t, y):
        return y[1] - HALF_PI
    cross.direction = 1.0

    def escape(t, y):
        return ESCAPE - abs(y[2])
    escape.terminal = True

    def singular(t, y):
        return abs(math.sin(y[1])) - SING_GUARD
    singular.terminal = True

    pts = [(q1, p1, 0.0)]
    y = np.array([q1, HALF_PI, p1, p2])
    t0, status = 0.0, "max_time"
    sec_res, en_res = 0.0, abs(H_reduced(y, C, xi) - spec.h)
    while t0 < spec.t_max and len(pts) < spec.max_crossings:
        t1 = min(t0 + CHUNK, spec.t_max)
        try:
            sol = _solve(f, (t0, t1), y, tol, tol, True, events=[cross, escape, singular])
        except StepFailure:
            if strict:
                raise
            status = "step_failure"
            break
        for te in sol.t_events[0]:
            if te - t0 < 1e-9 and t0 == 0.0:
                continue  # the seed itself
            g = lambda s: sol.sol(s)[1] - HALF_PI  # noqa: E731
            a, b = te - 1e-6, te + 1e-6
            if g(a) < 0 < g(b):
                te = brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            ye = sol.sol(te)
            if ye[3] <= 0:
                continue
            sec_res = max(sec_res, abs(ye[1] - HALF_PI))
            en_res = max(en_res, abs(H_reduced(ye, C, xi) - spec.h))
            pts.append((_wrap(ye[0]), ye[2], te))
            if len(pts) >= spec.max_crossings:
                break
        if sol.t_events[1].size:
            if strict:
                raise EscapeDetected(f"seed {seed_id}: |p1| exceeded {ESCAPE}")
            status = "escaped"
            break
        if sol.t_events[2].size:
            if strict:
                raise CoordinateSingularity(f"seed {seed_id}: sin q2 -> 0")
            status = "coordinate_singularity"
            break
        y, t0 = sol.y[:, -1], sol.t[-1]
    if status == "max_time" and len(pts) >= spec.max_crossings:
        status = "ok"
    return SeedResult(seed_id, (q1, p1), status, np.array(pts), False, 0.0, sec_res, en_res)


def run_section(spec: SectionSpec, tol: float = 1e-12, strict: bool = False,
                threads: int | None = None) -> SectionResult:
    """Section points ``(q1, p1, t)`` for every seed, seed point first.

    With ``strict`` the per-seed diagnostics (escape, coordinate
    singularity, step failure) are raised instead of recorded.
    """
    check_tol(tol)
    threads = thread_cap() if threads is None else threads
    jobs = [(i, float(q), float(p)) for i, (q, p) in enumerate(spec.seeds)]

    def run(job):
        return _one_seed(job[0], job[1], job[2], spec, tol, strict)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(run, jobs))
    else:
        out = [run(j) for j in jobs]
    return SectionResult(spec, out)
