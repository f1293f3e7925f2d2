import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sqbias import PreconditionError, l1_distance, rademacher, square_bias
from sqbias.bounds import (
    CSV_HEADER,
    bound_curve,
    compare_leading_terms,
    corollary1_bound,
    corollary2_bound,
    corollary2_curve,
    diagnostics_g,
    eq9_bound,
    eq9_curve,
    power_bound,
)
from sqbias.distmodel import abs_moment
from sqbias.extremal import TwoPointFamily
from sqbias.metrics import cf_distance_bound
from sqbias.rng import SplitMix64, random_standardized

from oracles import trapezoid_cor2, trapezoid_eq9


class TestSimpleBounds:
    def test_corollary1(self):
        assert corollary1_bound(2.0, 0.0) == 0.0
        assert corollary1_bound(2.0, 2.0) == 2.0
        assert corollary1_bound(1.0, -0.5) == pytest.approx(2 * math.sin(0.25), abs=1e-16)

    def test_rejects_small_beta3(self):
        for fn in (corollary1_bound, eq9_bound, corollary2_bound):
            with pytest.raises(PreconditionError):
                fn(0.9, 1.0)

    def test_power(self):
        assert power_bound(3.0, 2.0) == 4.0


class TestEq9:
    def test_zero(self):
        assert eq9_bound(2.0, 0.0) == 0.0

    def test_trapezoid_oracle(self):
        assert eq9_bound(2.0, 0.5) == pytest.approx(trapezoid_eq9(2.0, 0.5), abs=1e-10)

    def test_below_power_bound(self):
        for b3 in (1.0, 1.7, 4.0, 12.0):
            for t in np.linspace(0.01, math.pi / (2 * b3), 15):
                assert eq9_bound(b3, t) < power_bound(b3, t)

    def test_closed_form_majorant(self):
        # dropping exp((u^2 - t^2)/2) <= 1 gives 32/b^2 (sin(bt/4) - (bt/4) cos(bt/4))
        for b3, t in [(1.0, 1.0), (3.0, 0.5), (6.0, 0.4)]:
            y = b3 * t / 4
            assert eq9_bound(b3, t) <= 32 / b3**2 * (math.sin(y) - y * math.cos(y))

    def test_curve_matches_scalar(self):
        ts = np.linspace(0, 5, 26)
        curve = eq9_curve(2.5, ts)
        assert_allclose(curve, [eq9_bound(2.5, t) for t in ts], atol=1e-12)

    def test_even_in_t(self):
        assert eq9_bound(2.0, -1.3) == eq9_bound(2.0, 1.3)


class TestCorollary2:
    def test_zero(self):
        assert corollary2_bound(3.0, 0.0) == 0.0

    @pytest.mark.parametrize("b3,t", [(3.0, 0.4), (1.0, 2.0), (5.0, 3.5), (1.3, 5.0)])
    def test_trapezoid_oracle(self, b3, t):
        assert corollary2_bound(b3, t) == pytest.approx(trapezoid_cor2(b3, t), abs=1e-9)

    @pytest.mark.parametrize("b3,t", [(3.0, 0.4), (2.0, 3.0)])
    def test_outer_reading_oracle(self, b3, t):
        got = corollary2_bound(b3, t, reading="outer")
        assert got == pytest.approx(trapezoid_cor2(b3, t, reading="outer"), abs=1e-9)

    def test_pointwise_never_above_outer(self):
        ts = np.linspace(0, 5, 51)
        for b3 in (1.0, 2.0, 7.0):
            pw = corollary2_curve(b3, ts)
            outer = corollary2_curve(b3, ts, reading="outer")
            assert np.all(pw <= outer + 1e-13)

    def test_tolerance_halving_is_stable(self):
        ts = np.linspace(0, 5, 21)
        for b3 in (1.0, 4.0):
            a = corollary2_curve(b3, ts, tol=1e-12)
            b = corollary2_curve(b3, ts, tol=5e-13)
            assert np.max(np.abs(a - b)) < 1e-10
            assert abs(eq9_bound(b3, 3.0, tol=1e-12) - eq9_bound(b3, 3.0, tol=5e-13)) < 1e-10

    def test_beats_eq9_once_beta3_t_is_moderate(self):
        # p = 0.02 two-point law: the twice-integrated bound is the smaller one from t ~ 0.27 on
        d = TwoPointFamily(0.02).dist()
        curve = bound_curve(d, 0.5, 30)
        late = curve.t_values >= 0.3
        assert np.all(curve.bounds["cor2"][late] < curve.bounds["eq9"][late])

    def test_cubic_term_dominates_as_t_to_zero(self):
        # both bounds are b3 t^3/6 to leading order; the u^3/3 term adds ~t^4/12 to cor2 only
        b3, t = 2.0, 1e-2
        gap = corollary2_bound(b3, t) - eq9_bound(b3, t)
        assert gap == pytest.approx(t**4 / 12, rel=0.05)


class TestLeadingTerms:
    def test_example(self):
        twice, once = compare_leading_terms(2.0, 1.0)
        assert twice == pytest.approx(2 * (1 - math.sin(1)), abs=1e-15)
        assert once == pytest.approx(8 * (math.sin(0.5) - 0.5 * math.cos(0.5)), abs=1e-15)
        assert twice == pytest.approx(0.3171, abs=1e-4)
        assert once == pytest.approx(0.32507, abs=1e-4)

    def test_zero(self):
        assert compare_leading_terms(3.0, 0.0) == (0.0, 0.0)

    def test_small_t_equivalent_to_power(self):
        twice, once = compare_leading_terms(1.0, 1e-3)
        p = 1e-9 / 6
        assert twice == pytest.approx(p, rel=1e-6)
        assert once == pytest.approx(p, rel=1e-6)

    def test_regime(self):
        with pytest.raises(PreconditionError, match="outside stated regime"):
            compare_leading_terms(2.0, 2.0)

    def test_strict_on_random_samples(self):
        rng = np.random.default_rng(5)
        for b3 in rng.uniform(1, 30, 200):
            t = rng.uniform(0, math.pi / b3)
            twice, once = compare_leading_terms(b3, t)
            assert twice < once


class TestDiagnostics:
    def test_zero(self, two_point):
        assert tuple(diagnostics_g(two_point, 0.0)) == (0.0, 0.0, 0.0)

    def test_rademacher_g1_vanishes(self, rad):
        for s in (0.3, 1.0, 4.0):
            assert diagnostics_g(rad, s).g1 <= 1e-15

    def test_contracts(self):
        rng = SplitMix64(51)
        for _ in range(20):
            d = random_standardized(rng)
            for s in np.linspace(0.05, 5, 12):
                g = diagnostics_g(d, s)
                assert g.g2 <= s * s + 1e-12
                assert g.g3 <= 2 * s * s + 1e-12
                assert g.g1 <= corollary1_bound(abs_moment(d, 3), s) + 1e-12

    def test_two_point_small_s(self, two_point):
        b3 = abs_moment(two_point, 3)
        assert diagnostics_g(two_point, 0.1).g1 == pytest.approx(b3 * 0.1, rel=0.05)

    def test_requires_standardized(self):
        with pytest.raises(PreconditionError):
            diagnostics_g(rademacher(2.0), 1.0)


class TestBoundCurve:
    def test_rademacher(self, rad):
        curve = bound_curve(rad, 3.0, 30)
        assert len(curve.t_values) == 31
        assert curve.holds()
        small = (curve.t_values > 0) & (curve.t_values <= math.pi / 2)
        assert np.all(curve.bounds["eq9"][small] < curve.bounds["power"][small])
        assert np.all(curve.g1 <= 1e-15)

    def test_first_row_zero(self, two_point):
        curve = bound_curve(two_point, 1.0, 10)
        assert all(v == 0 for v in next(iter(curve.rows())))

    def test_csv(self, rad):
        text = bound_curve(rad, 1.0, 4).to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == ",".join(CSV_HEADER) == "t,r,power,eq9,cor2,g1,cor1"
        assert len(lines) == 6
        row = [float(x) for x in lines[3].split(",")]
        assert row[0] == 0.5

    def test_random_laws_hold(self):
        rng = SplitMix64(52)
        for _ in range(20):
            d = random_standardized(rng)
            curve = bound_curve(d, 5.0, 50)
            assert curve.min_slack >= -1e-9
            l1 = l1_distance(d, square_bias(d))
            for t, g1, c1 in zip(curve.t_values, curve.g1, curve.bounds["cor1"]):
                assert g1 <= cf_distance_bound(l1, t) + 1e-9
                assert cf_distance_bound(l1, t) <= c1 + 1e-15

    def test_requires_standardized(self):
        with pytest.raises(PreconditionError):
            bound_curve(rademacher(2.0), 1.0, 5)

    def test_bad_grid(self, rad):
        with pytest.raises(PreconditionError):
            bound_curve(rad, 0.0, 5)
