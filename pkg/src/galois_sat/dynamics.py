"""Euler-Poisson equations of a rigid satellite with gravity-gradient and
induced magnetic torques.

State vectors are flat 9-arrays ``(M1, M2, M3, N1, N2, N3, S1, S2, S3)``
in the body frame: angular momentum ``M``, orbit normal ``N`` and radial
direction ``S``.  Real and complex states share the same code paths.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._ode import PathSolution, check_tol, integrate_path
from .errors import UnsupportedParams

CSV_HEADER = ["t", "M1", "M2", "M3", "N1", "N2", "N3", "S1", "S2", "S3"]
HYPERBOLIC_TOL = 1e-8


@dataclass(frozen=True)
class SatelliteParams:
    """Physical parameters; defaults follow the normalisation
    ``A = B = 1``, ``omega_O = omega_K = 1``, ``L = e3``."""

    C: float = 1.7
    xi: float = 0.0
    A: float = 1.0
    B: float = 1.0
    omega_O: float = 1.0
    omega_K: float = 1.0
    L: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        A, B, C = self.A, self.B, self.C
        if min(A, B, C) <= 0:
            raise UnsupportedParams("principal moments must be positive")
        if not (A < B + C and B < C + A and C < A + B):
            raise UnsupportedParams(
                f"moments (A,B,C)=({A},{B},{C}) violate the triangle inequalities")
        if self.omega_O <= 0 or self.omega_K <= 0:
            raise UnsupportedParams("orbital rates must be positive")
        L = tuple(float(v) for v in self.L)
        if abs(sum(v * v for v in L) - 1.0) > 1e-12:
            raise UnsupportedParams("magnetic axis L must be a unit vector")
        object.__setattr__(self, "L", L)

    @property
    def inertia(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C], dtype=float)

    @property
    def symmetric(self) -> bool:
        return self.A == self.B


class ExtendedState(NamedTuple):
    M: np.ndarray
    N: np.ndarray
    S: np.ndarray

    @classmethod
    def from_array(cls, x) -> "ExtendedState":
        x = np.asarray(x)
        return cls(x[0:3], x[3:6], x[6:9])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.M, self.N, self.S])


class FirstIntegrals(NamedTuple):
    H: complex
    H2: complex
    H3: complex
    H4: complex
    H5: complex | None


def _arr(x) -> np.ndarray:
    if isinstance(x, ExtendedState):
        return x.as_array()
    return np.asarray(x)


def torque_gravity(S, params: SatelliteParams) -> np.ndarray:
    S = np.asarray(S)
    return 3.0 * params.omega_K**2 * np.cross(S, params.inertia * S)


def torque_magnetic(N, params: SatelliteParams) -> np.ndarray:
    N = np.asarray(N)
    L = np.asarray(params.L)
    return params.xi * np.dot(L, N) * np.cross(L, N)


def rhs(x, params: SatelliteParams) -> np.ndarray:
    """Right-hand side of the Euler-Poisson system."""
    x = _arr(x)
    M, N, S = x[0:3], x[3:6], x[6:9]
    Omega = M / params.inertia
    dM = np.cross(M, Omega) + torque_gravity(S, params) + torque_magnetic(N, params)
    dN = np.cross(N, Omega)
    dS = np.cross(S, Omega - params.omega_O * N)
    return np.concatenate([dM, dN, dS])


def _hat(v) -> np.ndarray:
    """Matrix of ``w -> v x w``."""
    return np.array([[0, -v[2], v[1]],
                     [v[2], 0, -v[0]],
                     [-v[1], v[0], 0]], dtype=np.result_type(v, float))


def structure_matrix(x) -> np.ndarray:
    """Lie-Poisson tensor with ``{M_i, M_j} = -eps_ijk M_k`` and the analogous
    ``M``-``N``, ``M``-``S`` brackets; ``N``, ``S`` mutually commute."""
    x = _arr(x)
    M, N, S = x[0:3], x[3:6], x[6:9]
    Z = np.zeros((3, 3), dtype=np.result_type(x, float))
    hM, hN, hS = _hat(M), _hat(N), _hat(S)
    return np.block([[hM, hN, hS],
                     [hN, Z, Z],
                     [hS, Z, Z]])


def grad_H(x, params: SatelliteParams) -> np.ndarray:
    x = _arr(x)
    M, N, S = x[0:3], x[3:6], x[6:9]
    L = np.asarray(params.L)
    dM = M / params.inertia - params.omega_O * N
    dN = -params.omega_O * M - params.xi * np.dot(L, N) * L
    dS = 3.0 * params.omega_K**2 * params.inertia * S
    return np.concatenate([dM, dN, dS])


def casimir_gradients(x) -> list[np.ndarray]:
    """Gradients of ``<S,S>``, ``<N,N>`` and ``<N,S>``."""
    x = _arr(x)
    N, S = x[3:6], x[6:9]
    z = np.zeros(3, dtype=x.dtype)
    return [np.concatenate([z, z, 2 * S]),
            np.concatenate([z, 2 * N, z]),
            np.concatenate([z, S, N])]


def hamiltonian(x, params: SatelliteParams):
    x = _arr(x)
    M, N, S = x[0:3], x[3:6], x[6:9]
    I = params.inertia
    LN = np.dot(params.L, N)
    return (0.5 * np.dot(M, M / I) - params.omega_O * np.dot(M, N)
            + 1.5 * params.omega_K**2 * np.dot(S, I * S) - 0.5 * params.xi * LN * LN)


def first_integrals(x, params: SatelliteParams) -> FirstIntegrals:
    """Energy, the three Casimirs, and ``M3`` when the body is symmetric."""
    x = _arr(x)
    N, S = x[3:6], x[6:9]
    H5 = x[2] if params.symmetric else None
    return FirstIntegrals(hamiltonian(x, params), np.dot(S, S), np.dot(N, N),
                          np.dot(N, S), H5)


@dataclass
class Trajectory:
    """Integrated trajectory; ``t`` may be complex for polyline time paths."""

    t: np.ndarray
    x: np.ndarray  # shape (n, 9)
    params: SatelliteParams
    _path: PathSolution = field(repr=False, default=None)

    @property
    def complex_time(self) -> bool:
        return np.iscomplexobj(self.t)

    def __call__(self, t):
        """Dense state at real time(s) ``t``; shape ``(9,)`` or ``(9, n)``."""
        if self._path is None or not self._path.segments:
            return self.x[-1]
        return self._path.at(t)

    def integrals(self) -> list[FirstIntegrals]:
        return [first_integrals(row, self.params) for row in self.x]

    def to_csv(self, path) -> None:
        write_trajectory_csv(path, self.t, self.x)


def write_trajectory_csv(path, t, x) -> None:
    t = np.asarray(t)
    cplx = np.iscomplexobj(t) or np.iscomplexobj(x)
    header = (["t_re", "t_im"] + CSV_HEADER[1:]) if np.iscomplexobj(t) else CSV_HEADER
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for ti, xi in zip(t, x):
            tcols = [f"{ti.real:.17g}", f"{ti.imag:.17g}"] if np.iscomplexobj(t) else [f"{ti:.17g}"]
            if cplx and np.iscomplexobj(xi):
                vals = [f"{complex(v):.17g}" for v in xi]
            else:
                vals = [f"{float(np.real(v)):.17g}" for v in xi]
            w.writerow(tcols + vals)


def integrate(x0, params: SatelliteParams, t_span, tol: float = 1e-12,
              t_eval=None) -> Trajectory:
    """Integrate the Euler-Poisson system.

    ``t_span`` is ``(t0, t1)`` for real time or a sequence of complex
    vertices describing a polyline in the complex time plane.

    Raises
    ------
    StepFailure
        If the step size underflows (e.g. near a movable singularity).
    """
    check_tol(tol)
    x0 = _arr(x0)
    path = list(t_span)
    sol = integrate_path(lambda t, y: rhs(y, params), x0, path, rtol=tol,
                         atol=tol, t_eval=t_eval)
    return Trajectory(sol.t, sol.y.T, params, sol)


@dataclass(frozen=True)
class Equilibrium:
    name: str
    state: np.ndarray
    hyperbolic: bool
    eigenvalues: tuple


def restricted_rhs(phi, M1, params: SatelliteParams):
    """Planar motion on the invariant manifold ``M2=M3=N2=N3=S1=0, N1=1``
    in the angle ``phi`` with ``S2 = -cos phi``, ``S3 = sin phi``."""
    dphi = M1 / params.A - params.omega_O
    dM1 = -3.0 * params.omega_K**2 * (params.C - params.B) * np.sin(phi) * np.cos(phi)
    return dphi, dM1


def restricted_energy(M1, S2, S3, params: SatelliteParams):
    return 0.5 * M1**2 - M1 + 1.5 * (params.B * S2**2 + params.C * S3**2)


def equilibria(params: SatelliteParams) -> list[Equilibrium]:
    """The four equilibria ``s+-``, ``u+-`` on the invariant plane, each
    tagged hyperbolic from the linearised planar system."""
    if not (params.A == params.B == 1.0 and tuple(params.L) == (0.0, 0.0, 1.0)):
        raise UnsupportedParams("equilibria require A = B = 1 and L = (0, 0, 1)")
    out = []
    # (name, S2, S3, phi)
    for name, S2, S3, phi in [("s+", -1.0, 0.0, 0.0), ("s-", 1.0, 0.0, math.pi),
                              ("u+", 0.0, 1.0, math.pi / 2), ("u-", 0.0, -1.0, -math.pi / 2)]:
        x = np.array([1.0, 0, 0, 1.0, 0, 0, 0, S2, S3])
        # d(dM1)/dphi at the fixed point; d(dphi)/dM1 = 1/A
        k2 = -3.0 * params.omega_K**2 * (params.C - params.B) * math.cos(2 * phi)
        J = np.array([[0.0, 1.0 / params.A], [k2, 0.0]])
        ev = np.linalg.eigvals(J)
        hyp = bool(np.max(np.abs(ev.real)) > HYPERBOLIC_TOL)
        out.append(Equilibrium(name, x, hyp, tuple(complex(v) for v in ev)))
    return out


def random_leaf_state(rng: np.random.Generator, m_scale: float = 1.0) -> np.ndarray:
    """Random point with ``|S| = |N| = 1`` and ``N . S = 0``."""
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    N, S = Q[:, 0], Q[:, 1]
    M = m_scale * rng.standard_normal(3)
    return np.concatenate([M, N, S])


def on_invariant_manifold(M1, S2, S3) -> np.ndarray:
    """Lift planar data to the 9-dimensional state."""
    dtype = np.result_type(M1, S2, S3, float)
    x = np.zeros(9, dtype=dtype)
    x[0], x[3], x[7], x[8] = M1, 1.0, S2, S3
    return x
