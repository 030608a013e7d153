"""Euler-angle (3-1-3) canonical coordinates on the symplectic leaf.

With ``A = B = 1``, ``omega_O = omega_K = 1`` and ``L = e3`` the angle
``q3`` is cyclic and ``p3 = M3`` is conserved.  The reduced system in
``x = (q1, q2, p1, p2)`` carries ``p3`` as a parameter; the invariant
plane of the particular solutions is ``q2 = pi/2, p2 = 0``.

The canonical Hamiltonian below differs from the Euler-Poisson energy by
the leaf constant ``3/2 <S,S> = 3/2``; :func:`H_canonical` adds it back,
:func:`H_reduced` does not.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._ode import check_tol, integrate_path
from .errors import CoordinateSingularity

SING_TOL = 1e-10
LEAF_CONSTANT = 1.5


class CanonicalState(NamedTuple):
    q1: float
    q2: float
    q3: float
    p1: float
    p2: float
    p3: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


class ReducedState(NamedTuple):
    q1: float
    q2: float
    p1: float
    p2: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


def _sin_q2(q2) -> float:
    s = np.sin(q2)
    if np.any(np.abs(s) < SING_TOL):
        raise CoordinateSingularity(f"|sin q2| = {np.min(np.abs(s)):.3e} below {SING_TOL}")
    return s


def K_matrix(q2, q3) -> np.ndarray:
    """``p = K M``."""
    s2, c2, s3, c3 = np.sin(q2), np.cos(q2), np.sin(q3), np.cos(q3)
    return np.array([[s3 * s2, c3 * s2, c2],
                     [c3, -s3, 0.0],
                     [0.0, 0.0, 1.0]])


def N_vector(q2, q3) -> np.ndarray:
    s2, c2 = np.sin(q2), np.cos(q2)
    return np.array([np.sin(q3) * s2, np.cos(q3) * s2, c2])


def S_vector(q1, q2, q3) -> np.ndarray:
    s1, c1 = np.sin(q1), np.cos(q1)
    s2, c2 = np.sin(q2), np.cos(q2)
    s3, c3 = np.sin(q3), np.cos(q3)
    return np.array([-s3 * c2 * s1 + c3 * c1,
                     -c3 * c2 * s1 - s3 * c1,
                     s2 * s1])


def canonical_to_MNS(c) -> np.ndarray:
    """Flat 9-state ``(M, N, S)`` from canonical coordinates.

    Raises
    ------
    CoordinateSingularity
        If ``K`` is singular (``sin q2 = 0``).
    """
    c = CanonicalState(*c)
    _sin_q2(c.q2)
    Kq = K_matrix(c.q2, c.q3)
    M = np.linalg.solve(Kq, [c.p1, c.p2, c.p3])
    return np.concatenate([M, N_vector(c.q2, c.q3), S_vector(c.q1, c.q2, c.q3)])


def MNS_to_canonical(x) -> CanonicalState:
    """Inverse of :func:`canonical_to_MNS` with ``q2`` in ``(0, pi)``.

    Raises
    ------
    CoordinateSingularity
        When ``N`` is (nearly) parallel to the body symmetry axis.
    """
    x = np.asarray(x, dtype=float)
    M, N, S = x[0:3], x[3:6], x[6:9]
    s2 = float(np.hypot(N[0], N[1]))
    if s2 < SING_TOL:
        raise CoordinateSingularity("N along e3: Euler angles undefined")
    q2 = float(np.arctan2(s2, N[2]))
    q3 = float(np.arctan2(N[0], N[1]))
    c1 = np.cos(q3) * S[0] - np.sin(q3) * S[1]
    q1 = float(np.arctan2(S[2] / s2, c1))
    p = K_matrix(q2, q3) @ M
    return CanonicalState(q1, q2, q3, *map(float, p))


def H_canonical(c, C: float, xi: float):
    """Canonical Hamiltonian on the leaf, equal to the Euler-Poisson energy
    (``A = B = 1``, unit rates, ``L = e3``)."""
    q1, q2, q3, p1, p2, p3 = c
    s2 = _sin_q2(q2)
    c2 = np.cos(q2)
    u = (p3 * c2 - p1) / s2
    return (0.5 * u * u + 0.5 * p2 * p2 + 0.5 * p3 * p3 / C - p1
            + 1.5 * (C - 1.0) * np.sin(q1) ** 2 * s2 * s2 - 0.5 * xi * c2 * c2
            + LEAF_CONSTANT)


def H_reduced(x, C: float, xi: float, p3: float = 0.0):
    """Two-degree-of-freedom Hamiltonian in ``(q1, q2, p1, p2)``; at
    ``p3 = 0`` this is ``p1^2/(2 sin^2 q2) + p2^2/2 - p1
    + 3/2 (C-1) sin^2 q1 sin^2 q2 - xi/2 cos^2 q2``."""
    q1, q2, p1, p2 = x
    return H_canonical((q1, q2, 0.0, p1, p2, p3), C, xi) - LEAF_CONSTANT


def canonical_rhs(c, C: float, xi: float) -> np.ndarray:
    """Hamilton's equations of :func:`H_canonical` in all six variables."""
    q1, q2, q3, p1, p2, p3 = c
    s2 = _sin_q2(q2)
    c2 = np.cos(q2)
    s1, c1 = np.sin(q1), np.cos(q1)
    u = (p3 * c2 - p1) / s2
    dq1 = -u / s2 - 1.0
    dq2 = p2
    dq3 = u * c2 / s2 + p3 / C
    dp1 = -3.0 * (C - 1.0) * s1 * c1 * s2 * s2
    dp2 = -(u * (p1 * c2 - p3) / (s2 * s2)
            + 3.0 * (C - 1.0) * s1 * s1 * s2 * c2 + xi * c2 * s2)
    return np.array([dq1, dq2, dq3, dp1, dp2, 0.0])


def reduced_rhs(x, C: float, xi: float, p3: float = 0.0) -> np.ndarray:
    """Canonical equations of :func:`H_reduced`."""
    q1, q2, p1, p2 = (float(v) for v in x)
    s2, c2 = math.sin(q2), math.cos(q2)
    if abs(s2) < SING_TOL:
        raise CoordinateSingularity(f"|sin q2| = {abs(s2):.3e} below {SING_TOL}")
    s1, c1 = math.sin(q1), math.cos(q1)
    u = (p3 * c2 - p1) / s2
    return np.array([-u / s2 - 1.0,
                     p2,
                     -3.0 * (C - 1.0) * s1 * c1 * s2 * s2,
                     -(u * (p1 * c2 - p3) / (s2 * s2)
                       + 3.0 * (C - 1.0) * s1 * s1 * s2 * c2 + xi * c2 * s2)])


def integrate_reduced(x0, C: float, xi: float, t_span, p3: float = 0.0,
                      tol: float = 1e-12, t_eval=None):
    check_tol(tol)
    return integrate_path(lambda t, y: reduced_rhs(y, C, xi, p3), np.asarray(x0, float),
                          list(t_span), rtol=tol, atol=tol, t_eval=t_eval)


def integrate_canonical(c0, C: float, xi: float, t_span, tol: float = 1e-12, t_eval=None):
    check_tol(tol)
    return integrate_path(lambda t, y: canonical_rhs(y, C, xi), np.asarray(c0, float),
                          list(t_span), rtol=tol, atol=tol, t_eval=t_eval)
