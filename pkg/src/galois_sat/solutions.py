"""The pendulum-type family of particular solutions on the invariant plane.

For a symmetric body (``B = 1``) with magnetic axis along the symmetry
axis the planar motion is an elliptic-function solution parametrised by
the modulus ``k``; ``omega = sqrt(3|C - B|)`` sets the time scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import on_invariant_manifold
from .elliptic import EllipticModulus, complete_K, jacobi
from .errors import PoleProximity, UnsupportedParams

POLE_TOL = 1e-6


class Branch(enum.Enum):
    C_less_1 = "C<1"
    C_greater_1 = "C>1"

    @classmethod
    def of(cls, C: float, B: float = 1.0) -> "Branch":
        if C == B:
            raise UnsupportedParams("C = B gives omega = 0 (degenerate family)")
        return cls.C_less_1 if C < B else cls.C_greater_1


@dataclass(frozen=True)
class ParticularSolution:
    k: float
    C: float
    branch: Branch
    B: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.k <= 1.0):
            raise UnsupportedParams(f"k={self.k!r} outside (0, 1]")
        if Branch.of(self.C, self.B) is not self.branch:
            raise UnsupportedParams(f"branch {self.branch.value} inconsistent with C={self.C}")

    @classmethod
    def from_params(cls, k: float, C: float, B: float = 1.0) -> "ParticularSolution":
        return cls(float(k), float(C), Branch.of(C, B), B)

    @property
    def omega(self) -> float:
        return math.sqrt(3.0 * abs(self.C - self.B))

    @property
    def modulus(self) -> EllipticModulus:
        return EllipticModulus(self.k)

    @property
    def pendulum_energy(self) -> float:
        """``E`` with ``k**2 = (omega**2 + E) / (2 omega**2)``."""
        w2 = self.omega**2
        return 2.0 * w2 * self.k**2 - w2

    def _jacobi(self, t):
        u = self.omega * np.asarray(t)
        if self.k == 1.0:
            # heteroclinic limit: sn -> tanh, cn = dn -> sech
            sech = 1.0 / np.cosh(u)
            return np.tanh(u), sech, sech
        return jacobi(u, self.modulus, pole_tol=0.0)

    def phi(self, t):
        """``(M1, S2, S3)`` at (complex) time ``t``.

        Raises
        ------
        PoleProximity
            If ``t`` lies within ``POLE_TOL`` of a pole.
        """
        if self.k < 1.0:
            dist = self.pole_distance(t)
            if np.any(dist < POLE_TOL):
                raise PoleProximity(f"t within {np.min(dist):.3e} of a pole")
        sn, cn, dn = self._jacobi(t)
        M1 = 1.0 + self.omega * self.k * cn
        if self.branch is Branch.C_greater_1:
            return M1, -dn, self.k * sn
        return M1, self.k * sn, dn

    def state(self, t) -> np.ndarray:
        """Full 9-dimensional state on the invariant manifold."""
        return on_invariant_manifold(*self.phi(t))

    def canonical_angle(self, t):
        """``(cos q1, sin q1)`` on the plane ``q2 = pi/2``; ``q1`` is the
        planar angle with ``S2 = -cos q1``, ``S3 = sin q1``."""
        _, S2, S3 = self.phi(t)
        return -S2, S3

    def periods(self) -> tuple[float, complex]:
        """Real and imaginary periods ``(4K/omega, 4iK'/omega)``."""
        m = self.modulus
        return 4.0 * m.K / self.omega, 4j * m.Kprime / self.omega

    def poles(self) -> tuple[complex, complex, complex, complex]:
        T, Tp = self.periods()
        t1 = 0.5 * T + 0.25 * Tp
        t2 = t1 + 0.5 * Tp
        t3 = t2 + 0.5 * T
        t4 = t3 - 0.5 * Tp
        return t1, t2, t3, t4

    def pole_distance(self, t):
        """Distance in ``t`` to the pole lattice ``(2mK + (2n+1)iK')/omega``."""
        m = self.modulus
        K, Kp = m.K, m.Kprime
        u = self.omega * np.asarray(t, dtype=complex)
        dx = u.real - 2 * K * np.round(u.real / (2 * K))
        y = u.imag - Kp
        dy = y - 2 * Kp * np.round(y / (2 * Kp))
        return np.hypot(dx, dy) / self.omega

    def energy_level(self) -> float:
        """``h(k) = omega^2 k^2 / 2 + (3 min(B, C) - 1) / 2``.

        For ``C > B`` this is ``omega^2 k^2 / 2 + (3B - 1) / 2``; on the
        other branch ``S3 = dn`` starts on the symmetry axis and the
        potential offset is ``3C/2`` instead of ``3B/2``.
        """
        return 0.5 * self.omega**2 * self.k**2 + 0.5 * (3.0 * min(self.B, self.C) - 1.0)

    def quadric_residuals(self, t):
        """Residuals of the two quadrics cutting out the phase curve."""
        M1, S2, S3 = self.phi(t)
        e = 0.5 * M1**2 - M1 + 1.5 * (self.B * S2**2 + self.C * S3**2) - self.energy_level()
        return e, S2**2 + S3**2 - 1.0


def periods(sol: ParticularSolution):
    return sol.periods()


def poles(sol: ParticularSolution):
    return sol.poles()


def energy_level(sol: ParticularSolution) -> float:
    return sol.energy_level()


def phi(t, sol: ParticularSolution):
    return sol.phi(t)


def k_from_energy(E: float, omega: float) -> float:
    return math.sqrt((omega**2 + E) / (2.0 * omega**2))


def small_k_period(omega: float) -> float:
    return 4.0 * complete_K(0.0) / omega
