import math
from fractions import Fraction

import numpy as np
import pytest

from galois_sat.errors import NotFuchsian
from galois_sat.jsonio import dumps17
from galois_sat.kovacic import (VERDICTS, Classification, case1, case1_candidates,
                                case1_solution_residual, case2, case2_candidates,
                                case2_quadratic_residual, classify, exponent_data, thread_cap)
from galois_sat.nve import FuchsianProblem, satellite_problem
from galois_sat.ratfun import RationalFunction


def reducible_point(k):
    """(C, xi, k) on both constraint curves, lower branch."""
    w2 = 2 / (2 * k * k - 1)
    C = 1 - w2 / 3
    return C, 1.5 * (1 - C), k


def sample_points(fp, n=50, seed=0):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        z = complex(*rng.uniform(-2, 2, 2))
        if min(abs(z - c) for c in fp.finite_singularities) > 0.05:
            pts.append(z)
    return np.array(pts)


class TestExponents:
    @pytest.mark.parametrize("C", [0.5, 1.5])
    def test_case1_sets(self, C):
        E_inf, E_fin = exponent_data(satellite_problem(C, 0.2, 0.5)).case1_sets()
        assert E_inf == (Fraction(-1), Fraction(2))
        assert all(E == (Fraction(1, 4), Fraction(3, 4)) for E in E_fin)

    @pytest.mark.parametrize("C", [0.5, 1.5])
    def test_case2_sets(self, C):
        E_inf, E_fin = exponent_data(satellite_problem(C, 0.2, 0.5)).case2_sets()
        assert E_inf == (-4, 2, 8)
        assert all(E == (1, 2, 3) for E in E_fin)

    def test_simple_pole_sets(self):
        r = RationalFunction.from_parts([1.0, 0.0, 1.0], [(1.0, 1), (-1.0, 2), (0.5j, 1)])
        ed = exponent_data(FuchsianProblem.from_rational(r))
        assert ed.case1_sets()[1][0] == (Fraction(1),)
        assert ed.case2_sets()[1][0] == (4,)

    def test_not_fuchsian(self):
        fp = FuchsianProblem.from_rational(RationalFunction.from_parts([1.0], [(0.0, 3)]))
        with pytest.raises(NotFuchsian):
            exponent_data(fp)
        with pytest.raises(NotFuchsian):
            classify(fp)


class TestCaseOne:
    @pytest.mark.parametrize("C, xi, k", [(1.5, 0.2, 0.5), (0.5, 0.75, 0.6), (0.3, -0.4, 0.8),
                                          (1.9, 1.1, 0.2)])
    def test_seven_candidates(self, C, xi, k):
        cands = case1_candidates(satellite_problem(C, xi, k))
        assert len(cands) == 7
        assert sorted(c.d for c in cands) == [0, 0, 0, 0, 0, 0, 1]

    def test_generic_point_fails(self):
        res = case1(satellite_problem(1.5, 0.2, 0.5))
        assert not res.found and res.solution is None
        assert all(c.residual > 1e-6 for c in res.candidates)

    @pytest.mark.parametrize("k", [math.sqrt(0.9), 0.8, 0.95])
    def test_exceptional_curve(self, k):
        C, xi, _ = reducible_point(k)
        fp = satellite_problem(C, xi, k)
        res = case1(fp)
        assert res.found
        P = res.solution.P
        assert P.degree() == 1 and abs(P.coef[1] - 1) == 0
        assert abs(P.coef[0] + 1 / fp.omega) < 1e-10
        assert res.solution.residual < 1e-10
        assert np.max(case1_solution_residual(fp, res.solution, sample_points(fp))) < 1e-8

    def test_printed_point(self):
        # k^2 = 0.9, omega^2 = 2.5, xi = 1.25
        fp = satellite_problem(1 - 2.5 / 3, 1.25, math.sqrt(0.9))
        res = case1(fp)
        assert res.found and abs(-res.solution.P.coef[0] - 0.632456) < 1e-6

    @pytest.mark.parametrize("C", [1.7, 1.8, 2.5 / 3 + 1])
    def test_exceptional_curve_upper_branch(self, C):
        # the constraint omega^2 = 2/(2k^2 - 1) together with 2 xi = 3(1 - C)
        w2 = 3 * (C - 1)
        k = math.sqrt((2 / w2 + 1) / 2)
        fp = satellite_problem(C, 1.5 * (1 - C), k)
        res = case1(fp)
        assert res.found and abs(res.solution.P.coef[0] + 1 / fp.omega) < 1e-10


class TestCaseTwo:
    def test_printed_solution(self):
        C, xi, k = 0.5, 0.75, 0.6
        fp = satellite_problem(C, xi, k)
        w = fp.omega
        res = case2(fp)
        assert res.found
        sol = res.solution
        assert sol.e == (-4, 1, 1, 1, 1) and sol.d == 2
        g2, g1, lead = sol.P.coef
        assert lead == 1
        assert abs(g1 - (-2 / w)) < 1e-8 and abs(g1 + 1.632993) < 1e-6
        assert abs(g2 - ((1 - 2 * k * k) * w * w + 4) / (2 * w * w)) < 1e-8
        assert abs(g2 - 1.473333) < 1e-6
        assert sol.residual < 1e-10

    def test_quadratic_gives_solution(self):
        fp = satellite_problem(0.5, 0.75, 0.6)
        res = case2(fp)
        z = sample_points(fp, 20, seed=3)
        assert np.median(case2_quadratic_residual(fp, res.solution, z)) < 1e-6

    def test_generic_point_fails(self):
        res = case2(satellite_problem(1.5, 0.2, 0.5))
        assert not res.found

    def test_candidate_degrees_nonnegative(self):
        cands = case2_candidates(satellite_problem(1.5, 0.2, 0.5))
        assert cands and all(c.d >= 0 for c in cands)
        assert {c.e[0] for c in cands} <= {-4, 2, 8}


class TestClassify:
    @pytest.mark.parametrize("params, expected", [
        ((1.5, 0.2, 0.5), Classification.SL2),
        ((0.5, 0.75, 0.6), Classification.Case2Solvable),
        ((1.6, -0.9, 0.4), Classification.Case2Solvable),
        (reducible_point(math.sqrt(0.9)), Classification.Reducible),
    ])
    def test_examples(self, params, expected):
        rep = classify(satellite_problem(*params))
        assert rep.classification is expected
        assert rep.verdict == VERDICTS[expected]

    @pytest.mark.parametrize("C, xi, k", [(0.4, 0.3, 0.5), (0.7, 0.45, 0.3), (0.2, 1.7, 0.6)])
    def test_branch_flip(self, C, xi, k):
        a = classify(satellite_problem(C, xi, k)).classification
        b = classify(satellite_problem(2 - C, -xi, k)).classification
        assert a is b

    def test_deterministic_and_thread_independent(self):
        fp = satellite_problem(1.5, 0.2, 0.5)
        a = dumps17(classify(fp, threads=1).to_dict())
        b = dumps17(classify(fp, threads=4).to_dict())
        assert a == b == dumps17(classify(fp, threads=1).to_dict())

    def test_report_layout(self):
        d = classify(satellite_problem(0.5, 0.75, 0.6)).to_dict()
        assert {"params", "case1", "case2", "classification", "candidates"} <= set(d)
        assert d["case2"]["found"] and d["case1"]["n_candidates"] == 7
        assert all({"e", "d", "residual"} <= set(c) for c in d["candidates"])

    def test_thread_cap(self, monkeypatch):
        monkeypatch.setenv("GALOIS_SAT_THREADS", "3")
        assert thread_cap() == 3
        monkeypatch.setenv("GALOIS_SAT_THREADS", "junk")
        assert thread_cap() == 1
