from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from galois_sat.errors import ClusteredRoots
from galois_sat.ratfun import (RationalFunction, find_roots, laurent_at_infinity,
                               partial_fractions, poly, singular_set, snap_rational)

coefs = st.floats(-3.0, 3.0)


def random_rf(rng, n_poles=4, max_order=2, deg_num=5):
    poles = []
    while len(poles) < n_poles:
        c = complex(*rng.uniform(-2, 2, 2))
        if all(abs(c - d) > 0.3 for d, _ in poles):
            poles.append((c, int(rng.integers(1, max_order + 1))))
    num = rng.standard_normal(deg_num + 1) + 1j * rng.standard_normal(deg_num + 1)
    return RationalFunction.from_parts(num, poles)


def sample_points(rng, rf, n=20):
    pts = []
    while len(pts) < n:
        z = complex(*rng.uniform(-3, 3, 2))
        if all(abs(z - c) > 0.2 for c, _ in rf.poles):
            pts.append(z)
    return np.array(pts)


class TestPartialFractions:
    def test_textbook(self):
        r = RationalFunction.from_polynomials([1.0], [-1.0, 0.0, 1.0])
        dec = partial_fractions(r)
        assert dec.term_at(1.0).a == 0
        assert dec.term_at(1.0).b == pytest.approx(0.5, abs=1e-15)
        assert dec.term_at(-1.0).b == pytest.approx(-0.5, abs=1e-15)

    def test_double_pole(self):
        # 1/(z-1)^2 + 3/(z-1) + 1/(z+2)
        r = (RationalFunction.from_parts([1.0], [(1.0, 2)])
             + RationalFunction.from_parts([3.0], [(1.0, 1)])
             + RationalFunction.from_parts([1.0], [(-2.0, 1)]))
        t = r.partial_fractions().term_at(1.0)
        assert t.order == 2
        assert abs(t.a - 1) < 1e-14 and abs(t.b - 3) < 1e-14

    @given(st.integers(0, 2**31 - 1))
    def test_reconstruction(self, seed):
        rng = np.random.default_rng(seed)
        r = random_rf(rng)
        z = sample_points(rng, r)
        ref = r(z)
        err = np.abs(partial_fractions(r)(z) - ref) / np.maximum(np.abs(ref), 1.0)
        assert np.max(err) < 1e-10

    def test_polynomial_part(self):
        r = RationalFunction.from_parts([1.0, 0.0, 0.0, 1.0], [(0.5, 1)])
        dec = r.partial_fractions()
        assert dec.polynomial_part.degree() == 2
        z = 1.7 + 0.3j
        assert abs(dec(z) - r(z)) < 1e-13

    def test_clustered(self):
        r = RationalFunction.from_parts([1.0], [(0.0, 1), (1e-8, 1)], reduce=False)
        with pytest.raises(ClusteredRoots):
            r.partial_fractions()

    def test_exact_snap(self):
        assert snap_rational(-0.1875 + 1e-12) == Fraction(-3, 16)
        assert snap_rational(0.1234567891) == 0.1234567891


class TestArithmetic:
    @given(st.integers(0, 2**31 - 1))
    def test_derivative_matches_finite_difference(self, seed):
        rng = np.random.default_rng(seed)
        r = random_rf(rng)
        h = 1e-6
        for z in sample_points(rng, r, 5):
            fd = (r(z + h) - r(z - h)) / (2 * h)
            assert abs(r.deriv()(z) - fd) <= 1e-7 * max(1.0, abs(fd))

    @given(st.integers(0, 2**31 - 1))
    def test_field_operations(self, seed):
        rng = np.random.default_rng(seed)
        r, s = random_rf(rng, 2), random_rf(rng, 3)
        for z in sample_points(rng, RationalFunction.from_parts([1.0], r.poles + s.poles), 5):
            assert abs((r + s)(z) - (r(z) + s(z))) < 1e-9 * max(1, abs(r(z)) + abs(s(z)))
            assert abs((r * s)(z) - r(z) * s(z)) < 1e-9 * max(1, abs(r(z) * s(z)))
            assert abs((r - r)(z)) < 1e-12

    def test_cancellation(self):
        r = RationalFunction.from_parts(poly([-1.0, 1.0]) * poly([2.0, 1.0]), [(1.0, 2)])
        assert r.poles == ((1.0, 1),) and r.deg_num == 1

    @pytest.mark.parametrize("roots", [[1.0, -1.0, 2j], [0.5, 0.5, -3.0], [1j, 1j, -1j, -1j]])
    def test_root_finder(self, roots):
        p = poly([1.0])
        for c in roots:
            p = p * poly([-c, 1.0])
        found = find_roots(p)
        assert sum(m for _, m in found) == len(roots)
        norm = np.linalg.norm(p.coef)
        for z, _ in found:
            assert abs(p(z)) < 1e-10 * norm
            assert min(abs(z - c) for c in roots) < 1e-8


class TestLaurent:
    def test_identity(self):
        powers, coeffs = laurent_at_infinity(RationalFunction.identity(), 3)
        assert list(powers) == [-1, 0, 1]
        assert np.allclose(coeffs, [1, 0, 0])

    def test_reconstruction(self):
        rng = np.random.default_rng(11)
        r = random_rf(rng, n_poles=4, deg_num=4)
        powers, coeffs = r.laurent_at_infinity(8)
        z = 1e6 * np.exp(0.3j)
        approx = np.sum(coeffs * z ** (-powers.astype(float)))
        assert abs(approx - r(z)) <= 1e-5 * abs(r(z))

    def test_single_coefficient(self):
        r = RationalFunction.from_polynomials([0.0, 0.0, 2.0], [1.0, 0.0, 0.0, 0.0, 1.0])
        assert r.laurent_coefficient_at_infinity(2) == 2.0
        assert r.laurent_coefficient_at_infinity(1) == 0.0


class TestSingularSet:
    def test_not_fuchsian(self):
        s = singular_set(RationalFunction.from_parts([1.0], [(0.0, 3)]))
        assert s.finite_points == ((0.0, 3),) and not s.fuchsian

    def test_order_at_infinity(self):
        assert singular_set(RationalFunction.from_parts([0, 0, 1.0])).order_infinity == 6
        assert singular_set(RationalFunction.from_parts([2.0], [(1.0, 1), (-1.0, 1)])
                            ).order_infinity == 2

    def test_zero_function(self):
        s = singular_set(RationalFunction.constant(0.0))
        assert s.order_infinity == 0 and s.fuchsian


class TestJSON:
    @given(st.integers(0, 2**31 - 1))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        r = random_rf(rng, n_poles=3)
        back = RationalFunction.loads(r.dumps())
        z = sample_points(rng, r, 5)
        assert np.max(np.abs(back(z) - r(z)) / np.maximum(1, np.abs(r(z)))) < 1e-9
        assert sorted(m for _, m in back.poles) == sorted(m for _, m in r.poles)

    def test_layout(self):
        d = RationalFunction.from_parts([1.0], [(1.0, 1)]).to_json_dict()
        assert d == {"num": [[1.0, 0.0]], "den": [[-1.0, 0.0], [1.0, 0.0]]}
