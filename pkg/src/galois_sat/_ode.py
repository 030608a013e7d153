"""Adaptive one-step integration along real spans and complex polylines.

Backed by scipy's DOP853 (8th order, embedded 5th/3rd order error
estimate, 7th order dense output).  Complex time paths are integrated
segment by segment with arclength as the real independent variable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StepFailure

MIN_RTOL = 1e-14
MAX_RTOL = 1e-4


def check_tol(tol: float) -> float:
    if not (MIN_RTOL <= tol <= MAX_RTOL):
        raise ValueError(f"tol={tol!r} outside [{MIN_RTOL}, {MAX_RTOL}]")
    return float(tol)


def _solve(fun, span, y0, rtol, atol, dense, t_eval=None, events=None):
    with warnings.catch_warnings():
        # DOP853 raises rtol below 100*eps on its own; acceptable here
        warnings.simplefilter("ignore", UserWarning)
        sol = solve_ivp(fun, span, y0, method="DOP853", rtol=rtol, atol=atol,
                        dense_output=dense, t_eval=t_eval, events=events)
    if sol.status == -1:
        raise StepFailure(sol.message)
    return sol


@dataclass
class Segment:
    start: complex
    end: complex
    length: float
    sol: object  # scipy OdeSolution

    def __call__(self, s):
        return self.sol(s)


@dataclass
class PathSolution:
    """Result of :func:`integrate_path`.

    ``t`` holds the (possibly complex) times of accepted steps, ``y`` the
    states as columns, ``segments`` the per-segment dense interpolants in
    arclength.
    """

    t: np.ndarray
    y: np.ndarray
    segments: list = field(default_factory=list)

    @property
    def y_end(self) -> np.ndarray:
        return self.y[:, -1]

    def at(self, t):
        """Dense evaluation at real time ``t`` (single real span only)."""
        if len(self.segments) != 1:
            raise ValueError("dense evaluation by time needs a single real span")
        seg = self.segments[0]
        return seg(np.asarray(t, dtype=float))


def integrate_path(fun, y0, path, rtol=1e-12, atol=None, dense=True, t_eval=None):
    """Integrate ``dy/dt = fun(t, y)`` along a polyline of (complex) times.

    Parameters
    ----------
    fun : callable
        ``fun(t, y)`` with complex or real ``t``.
    y0 : array_like
        Initial state (real or complex).
    path : sequence
        Vertices ``t_0, t_1, ...``; two real vertices give an ordinary span.
    t_eval : array_like, optional
        Output times, only honoured for a single real span.
    """
    y0 = np.asarray(y0)
    verts = [complex(v) for v in path]
    if atol is None:
        atol = rtol
    real_path = all(v.imag == 0.0 for v in verts) and not np.iscomplexobj(y0)
    if len(verts) == 2 and real_path:
        a, b = verts[0].real, verts[1].real
        if a == b:
            return PathSolution(np.array([a]), y0.reshape(-1, 1).copy(), [])
        sol = _solve(fun, (a, b), y0, rtol, atol, dense, t_eval)
        seg = Segment(verts[0], verts[1], abs(b - a), sol.sol)
        return PathSolution(sol.t, sol.y, [seg])
    y = y0.astype(complex)
    ts, ys, segs = [np.array([verts[0]])], [y.reshape(-1, 1)], []
    for a, b in zip(verts[:-1], verts[1:]):
        length = abs(b - a)
        if length == 0.0:
            continue
        u = (b - a) / length

        def g(s, yy, a=a, u=u):
            return fun(a + s * u, yy) * u

        sol = _solve(g, (0.0, length), y, rtol, atol, dense)
        segs.append(Segment(a, b, length, sol.sol))
        ts.append(a + sol.t[1:] * u)
        ys.append(sol.y[:, 1:])
        y = sol.y[:, -1]
    return PathSolution(np.concatenate(ts), np.hstack(ys), segs)
