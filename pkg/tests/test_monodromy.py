import math

import numpy as np
import pytest

from galois_sat.errors import ClearanceViolation
from galois_sat.monodromy import (INFINITY, Loop, MonodromyMatrix, eigenvector_alignment,
                                  expm_fixture, group_relations, heteroclinic_diagnostic,
                                  local_monodromy_infinity, loop_around, loop_infinity,
                                  ordered_singularities, transport, transport_system,
                                  winding_number)
from galois_sat.nve import satellite_problem


def log_system(t):
    # t^2 xi' = [[0, t^2], [-1, t]] xi, solutions (t, t ln t) and derivatives
    return np.array([[0.0, 1.0], [-1.0 / t**2, 1.0 / t]])


def euler_system(Cmat):
    Cmat = np.asarray(Cmat, dtype=complex)
    return lambda t: Cmat / t


JORDAN = np.array([[1.0, 2j * math.pi], [0.0, 1.0]])


@pytest.fixture(scope="module")
def sl2_report():
    return group_relations(satellite_problem(1.5, 0.2, 0.5))


class TestLoops:
    def test_winding(self):
        lp = loop_around(2.0, [2.0, -1.0], base_point=0j)
        assert winding_number(lp.vertices, 2.0) == 1
        assert winding_number(lp.vertices, -1.0) == 0
        assert winding_number(lp.reversed().vertices, 2.0) == -1

    def test_infinity_loop_winds_negatively(self):
        pts = [1.0, -1.0, 1j, -1j]
        lp = loop_infinity(pts)
        assert lp.target == INFINITY
        assert all(winding_number(lp.vertices, c) == -1 for c in pts)
        lp.check(pts, 1e-3)

    def test_clearance(self):
        lp = loop_around(1.0, [1.0, 1.2], radius=0.5)
        with pytest.raises(ClearanceViolation):
            lp.check([1.0, 1.2], 1e-3)
        grazing = Loop(0j, (0j, 2.0 + 1e-5j, 2.0 + 1j, 0j), 1.0)
        with pytest.raises(ClearanceViolation):
            grazing.check([1.0], 1e-3)

    def test_open_loop(self):
        with pytest.raises(ClearanceViolation):
            Loop(0j, (0j, 1.0, 1j), 0.5).check([5.0], 1e-3)

    def test_ordering(self):
        assert ordered_singularities([1.0, 1j, -1.0, -1j]) == [-1j, 1.0, 1j, -1.0]


class TestFixtures:
    def test_log_system_is_jordan(self):
        M = transport_system(log_system, loop_around(0j, [0j], base_point=1.0), [0j])
        # a Jordan block is not diagonalisable, so compare spectra through
        # the characteristic polynomial rather than ill-conditioned eigenvalues
        assert abs(M.trace - np.trace(JORDAN)) < 1e-7
        assert abs(M.det - np.linalg.det(JORDAN)) < 1e-7
        N = M.entries - np.eye(2)
        assert np.linalg.norm(N) > 1.0
        assert np.linalg.norm(N @ N) < 1e-7
        # in the basis (t, t ln t) the matrix is exactly the Jordan form
        Y0 = np.array([[1.0, 0.0], [1.0, 1.0]])  # values and derivatives at t = 1
        assert np.allclose(np.linalg.solve(Y0, M.entries @ Y0), JORDAN, atol=1e-9)
        assert M.classify() == "unipotent"

    @pytest.mark.parametrize("Cmat", [[[0.3, 1.0], [0.2, -0.1]], [[0.5, 0.0], [0.0, -0.5]],
                                      [[0.25, 1.0], [0.0, 0.25]]])
    def test_euler_system(self, Cmat):
        M = transport_system(euler_system(Cmat), loop_around(0j, [0j], base_point=1.0), [0j])
        assert np.max(np.abs(M.entries - expm_fixture(Cmat))) < 1e-7

    def test_regular_point_gives_identity(self):
        lp = loop_around(2.0, [2.0], base_point=1.0, radius=0.3)
        M = transport_system(log_system, lp, [0j])
        assert np.max(np.abs(M.entries - np.eye(2))) < 1e-10


class TestSatelliteTransport:
    def test_homotopy_invariance(self):
        fp = satellite_problem(1.5, 0.2, 0.5)
        c = fp.finite_singularities[0]
        pts = fp.finite_singularities
        a = transport(fp, loop_around(c, pts))
        b = transport(fp, loop_around(c, pts, radius=0.1, n=48))
        assert np.max(np.abs(a.entries - b.entries)) < 1e-8

    def test_inverse_loop(self):
        fp = satellite_problem(1.5, 0.2, 0.5)
        lp = loop_around(fp.finite_singularities[2], fp.finite_singularities)
        M = transport(fp, lp).entries
        Minv = transport(fp, lp.reversed()).entries
        assert np.max(np.abs(M @ Minv - np.eye(2))) < 1e-9

    def test_base_point_change_conjugates(self):
        fp = satellite_problem(1.5, 0.2, 0.5)
        pts = fp.finite_singularities
        c = pts[0]
        a = transport(fp, loop_around(c, pts, base_point=0j))
        b = transport(fp, loop_around(c, pts, base_point=0.1 + 0.1j))
        assert abs(a.trace - b.trace) < 1e-9

    def test_finite_local_monodromy(self, sl2_report):
        # exponents 1/4, 3/4 at every finite pole: eigenvalues +-i
        for M in sl2_report.finite:
            ev = sorted(M.eigenvalues, key=lambda v: v.imag)
            assert np.allclose(ev, [-1j, 1j], atol=1e-8)

    def test_det_and_sphere(self, sl2_report):
        assert sl2_report.det_residual < 1e-8
        assert sl2_report.sphere_residual < 1e-6

    def test_sphere_relation_other_base(self):
        rep = group_relations(satellite_problem(0.5, 0.75, 0.6), base_point=0.05 + 0.02j)
        assert rep.sphere_residual < 1e-6

    @pytest.mark.parametrize("C, xi, k, expected", [
        (1.5, 0.2, 0.5, "unipotent"), (0.5, 0.2, 0.5, "unipotent"), (1.7, -0.3, 0.8, "unipotent"),
        (0.5, 0.75, 0.6, "identity"), (1.6, -0.9, 0.3, "identity"), (0.2, 1.2, 0.7, "identity"),
    ])
    def test_local_monodromy_at_infinity(self, C, xi, k, expected):
        M, cls = local_monodromy_infinity(satellite_problem(C, xi, k))
        assert cls == expected
        assert abs(M.det - 1) < 1e-8

    def test_irreducible_and_non_abelian(self, sl2_report):
        assert sl2_report.irreducible and sl2_report.non_abelian
        assert sl2_report.alignment > 1e-6
        assert max(sl2_report.commutator_norms.values()) > 1e-3

    def test_alignment_detects_common_eigenvector(self):
        A = np.array([[2.0, 1.0], [0.0, 0.5]])
        B = np.array([[1.5, -3.0], [0.0, 1 / 1.5]])
        assert eigenvector_alignment([A, B]) < 1e-12

    def test_threads_agree(self):
        fp = satellite_problem(1.5, 0.2, 0.5)
        a = group_relations(fp, threads=1)
        b = group_relations(fp, threads=3)
        assert np.array_equal(a.infinity.entries, b.infinity.entries)

    def test_report_layout(self, sl2_report):
        d = sl2_report.to_dict()
        assert len(d["singularities"]) == 5
        assert d["relations"]["irreducible"] is True

    def test_heteroclinic_diagnostic(self):
        out = heteroclinic_diagnostic(1.5, 0.2, [0.9])
        assert out[0]["k"] == 0.9 and len(out[0]["traces"]) == 4


class TestMatrixClass:
    def test_identity(self):
        assert MonodromyMatrix(np.eye(2, dtype=complex)).classify() == "identity"

    def test_other(self):
        assert MonodromyMatrix(np.diag([1j, -1j])).classify() == "other"

    def test_warns_between_thresholds(self):
        M = MonodromyMatrix(np.array([[1.0, 1e-4], [0.0, 1.0]], dtype=complex))
        with pytest.warns(RuntimeWarning):
            assert M.classify() == "unipotent"
