"""Measure machinery: distribution functions by every method, rearrangement
identities, the three quasinorms, exact product level sets against brute
force, the damped-tail estimates, and the rearrangement pairing inequality."""

import math
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from lagheat.functions import BoxUnion, NormDivergenceError
from lagheat.measure import (
    DistributionCurve,
    RearrangementCurve,
    default_s_grid,
    dist_curve_1d,
    dist_fn,
    field_curve_1d,
    gaussian_tail_levelset,
    levelset_bound_check,
    lorentz_p1_norm,
    lorentz_zygmund_norm,
    product_levelset_exact,
    rearrange,
    simplex_band_curve,
    unit_cube_product_sublevel,
    unit_cube_product_sublevel_inverse,
    weak_orlicz_quasinorm,
)


class ProdInv:
    def evaluate(self, x):
        with np.errstate(divide="ignore"):
            return 1.0 / np.prod(np.maximum(x, 1e-300), axis=1)


def indicator_curve(measure, lam_lo=1e-3, lam_hi=1e3, n=241):
    lams = np.geomspace(lam_lo, lam_hi, n)
    lams = np.sort(np.concatenate([lams, [1.0 - 1e-12, 1.0]]))
    m = np.where(lams < 1.0, measure, 0.0)
    return DistributionCurve(lams, m, np.zeros_like(m), "exact-box")


class TestDistFn:
    def test_indicator_level_set(self):
        E = BoxUnion([[0.0, 0.0]], [[1.0, 1.0]])
        curve = dist_fn(E, None, [0.5, 2.0], method="exact-box")
        assert curve.measure[0] == 1.0 and curve.measure[1] == 0.0

    def test_exact_box_with_domain_clip(self):
        E = BoxUnion([[0.0, 0.0]], [[2.0, 1.0]])
        curve = dist_fn(E, ([0.0, 0.0], [1.0, 1.0]), [0.5], method="exact-box")
        assert curve.measure[0] == pytest.approx(1.0)

    def test_closed_form_product(self):
        from lagheat.constructions import ProductPowerField

        fld = ProductPowerField(2, 1.0, 1.0)
        curve = dist_fn(fld, None, [math.e], method="closed-form")
        assert curve.measure[0] == pytest.approx(2.0 / math.e, rel=1e-14)

    def test_monte_carlo_matches_closed_form(self):
        curve = dist_fn(
            ProdInv(), ([0.0, 0.0], [1.0, 1.0]), [math.e], method="monte-carlo",
            budget=1_000_000, seed=1,
        )
        assert curve.measure[0] == pytest.approx(2.0 / math.e, rel=0.01)
        assert curve.stderr[0] < 0.01 * curve.measure[0]

    def test_grid_method(self):
        curve = dist_fn(
            ProdInv(), ([0.0, 0.0], [1.0, 1.0]), [math.e], method="grid",
            resolution=200, refine=4,
        )
        assert curve.measure[0] == pytest.approx(2.0 / math.e, rel=1e-3)
        assert curve.stderr[0] < 1e-3

    def test_monotonicity_enforced(self):
        with pytest.raises(ValueError):
            DistributionCurve(
                np.array([1.0, 2.0]), np.array([0.5, 0.9]), np.zeros(2), "grid"
            )

    def test_mc_determinism(self):
        kw = dict(method="monte-carlo", budget=100_000, seed=42)
        c1 = dist_fn(ProdInv(), ([0, 0], [1, 1]), [2.0, 10.0], **kw)
        c2 = dist_fn(ProdInv(), ([0, 0], [1, 1]), [2.0, 10.0], **kw)
        assert np.array_equal(c1.measure, c2.measure)


class TestRearrange:
    def test_indicator(self):
        r = rearrange(indicator_curve(1.0), default_s_grid(1e-6, 10, 64))
        assert np.all(r.fstar[r.s < 0.98] >= 1.0 - 1e-9)
        assert np.all(r.fstar[r.s > 1.02] == 0.0)

    def test_power_function(self):
        lams = np.geomspace(1e-2, 1e6, 64 * 8)
        m = np.minimum(1.0, lams**-2.0)
        r = rearrange(DistributionCurve(lams, m, np.zeros_like(m), "closed-form"),
                      np.geomspace(1e-8, 0.9, 300))
        worst = np.max(np.abs(r.fstar * np.sqrt(r.s) - 1.0))
        assert worst < 0.04  # one lambda-grid cell of resolution

    def test_fixed_point_of_rearrangement(self):
        # dist of a nonincreasing function reproduces it at the sample points
        lams = np.geomspace(1e-1, 1e2, 800)
        m = np.minimum(2.0, lams**-1.5)
        curve = DistributionCurve(lams, m, np.zeros_like(m), "closed-form")
        r = rearrange(curve, np.geomspace(1e-3, 1.9, 120))
        # f*(s) should invert: measure at level f*(s) ~ s
        back = np.interp(r.fstar, lams, m)
        ok = (r.fstar > lams[0]) & (r.fstar < lams[-1])
        assert np.max(np.abs(back[ok] / r.s[ok] - 1.0)) < 0.05

    def test_equimeasurability(self):
        from lagheat.constructions import ProductPowerField

        fld = ProductPowerField(2, 1.0, 0.25)
        lams = np.geomspace(1.0, 1e3, 200)
        m = np.array([fld.superlevel_measure_exact(l) for l in lams])
        curve = DistributionCurve(lams, m, np.zeros_like(m), "closed-form")
        r = rearrange(curve, np.geomspace(1e-10, 0.99, 400))
        # the rearrangement's own distribution matches the original curve
        for lam in (2.0, 10.0, 100.0):
            m_r = float(r.s[np.searchsorted(-r.fstar, -lam, side="right") - 1])
            assert m_r == pytest.approx(curve.at(lam), rel=0.06)


class TestLorentzNorms:
    def test_indicator_value(self):
        s = np.sort(np.concatenate([default_s_grid(1e-10, 10, 64), [1.0 - 1e-12, 1.0]]))
        f = np.where(s < 1.0, 1.0, 0.0)
        r = RearrangementCurve(s, f, "exact")
        assert lorentz_p1_norm(4.0 / 3.0, r) == pytest.approx(4.0 / 3.0, rel=1e-6)

    def test_homogeneity(self):
        s = default_s_grid(1e-8, 10, 64)
        f = s**-0.05 * (s < 1.0)
        r1 = RearrangementCurve(s, f, "t")
        r2 = RearrangementCurve(s, 2.0 * f, "t")
        assert lorentz_p1_norm(4.0, r2) == pytest.approx(2.0 * lorentz_p1_norm(4.0, r1), rel=1e-12)

    def test_borderline_divergence_is_flagged(self):
        # s^{-1/p} is exactly the borderline non-member of the (p,1) space
        s = default_s_grid(1e-8, 10, 64)
        r = RearrangementCurve(s, s**-0.25 * (s < 1.0), "t")
        with pytest.raises(NormDivergenceError):
            lorentz_p1_norm(4.0, r)

    def test_dilation(self):
        # f(x) -> f(x/tau) multiplies the norm by tau^{1/p}
        tau, p = 5.0, 4.0
        s = default_s_grid(1e-10, 100, 96)
        f1 = np.where(s < 1.0, 1.0, 0.0)
        f2 = np.where(s < tau, 1.0, 0.0)
        r1, r2 = RearrangementCurve(s, f1, "t"), RearrangementCurve(s, f2, "t")
        ratio = lorentz_p1_norm(p, r2) / lorentz_p1_norm(p, r1)
        assert ratio == pytest.approx(tau ** (1.0 / p), rel=0.02)

    def test_zygmund_reduces_at_zero_power(self):
        s = default_s_grid(1e-8, 10, 64)
        f = s**-0.5 * (s < 1.0)
        r = RearrangementCurve(s, f, "t")
        assert lorentz_zygmund_norm(4.0 / 3.0, 0.0, r) == lorentz_p1_norm(4.0 / 3.0, r)

    def test_zygmund_indicator_asymptotics(self):
        p0, npow = 4.0 / 3.0, 0.75
        for E in (1e-2, 1e-4, 1e-6):
            s = np.sort(np.concatenate([default_s_grid(1e-12, 10, 64), [E - 1e-15 * E, E]]))
            f = np.where(s < E, 1.0, 0.0)
            r = RearrangementCurve(s, f, "t")
            val = lorentz_zygmund_norm(p0, npow, r)
            ref = p0 * E ** (1.0 / p0) * math.log(2.0 + 1.0 / E) ** npow
            assert 0.5 < val / ref < 2.0

    def test_zygmund_monotone_in_power(self):
        s = default_s_grid(1e-10, 0.9, 64)
        f = s**-0.25
        r = RearrangementCurve(s, f, "t")
        vals = [lorentz_zygmund_norm(4.0 / 3.0, n, r) for n in (0.0, 0.5, 1.0)]
        assert vals[0] < vals[1] < vals[2]

    def test_divergence_flagged(self):
        s = default_s_grid(1e-10, 10, 64)
        f = s**-0.9  # s^{1/p0 - 0.9 - 1} with p0 = 4/3 diverges at 0
        r = RearrangementCurve(s, f, "t")
        with pytest.raises(NormDivergenceError):
            lorentz_p1_norm(4.0 / 3.0, r)


class TestWeakOrlicz:
    def test_collapses_to_weak_lp(self):
        curve = indicator_curve(1.0)
        eta = weak_orlicz_quasinorm(4.0, 0.0, curve)
        # weak-L4 quasinorm of chi_E, |E| = 1: sup lam m^{1/4} -> 1
        assert eta == pytest.approx(1.0, rel=0.01)

    def test_indicator_comparable(self):
        for E in (0.1, 1.0, 10.0):
            curve = indicator_curve(E)
            eta = weak_orlicz_quasinorm(4.0, 0.25, curve)
            assert 0.5 < eta / E**0.25 < 2.0

    def test_quasinorm_scaling(self):
        lams = np.geomspace(1e-2, 1e4, 300)
        m = np.minimum(1.0, lams**-4.0)
        c1 = DistributionCurve(lams, m, np.zeros_like(m), "t")
        c2 = DistributionCurve(2.0 * lams, m, np.zeros_like(m), "t")  # dist of 2f
        q1 = weak_orlicz_quasinorm(4.0, 0.5, c1)
        q2 = weak_orlicz_quasinorm(4.0, 0.5, c2)
        assert q2 <= 2.2 * q1
        assert q2 >= q1

    def test_norm_comparison_band(self):
        # with this normalization, Lorentz (p,1) >= p x weak quasinorm, with
        # equality exactly on indicators
        p = 4.0
        curve = indicator_curve(1.0)
        weak = weak_orlicz_quasinorm(p, 0.0, curve)
        s = np.sort(np.concatenate([default_s_grid(1e-10, 10, 64), [1.0 - 1e-12, 1.0]]))
        r = RearrangementCurve(s, np.where(s < 1.0, 1.0, 0.0), "t")
        lor = lorentz_p1_norm(p, r)
        assert lor / weak == pytest.approx(p, rel=0.02)
        # strict inequality for a non-indicator profile
        f2 = s**-0.125 * (s < 1.0)
        lams = np.geomspace(1e-2, 1e2, 400)
        m2 = np.minimum(1.0, lams**-8.0)
        weak2 = weak_orlicz_quasinorm(p, 0.0, DistributionCurve(lams, m2, np.zeros_like(m2), "t"))
        assert lorentz_p1_norm(p, RearrangementCurve(s, f2, "t")) >= p * weak2 * 0.99


class TestProductLevelSets:
    def test_examples(self):
        assert product_levelset_exact(1, 1.0, 2.0) == pytest.approx(0.5, rel=1e-15)
        assert product_levelset_exact(2, 1.0, math.e) == pytest.approx(2.0 / math.e, rel=1e-14)
        assert product_levelset_exact(3, 1.0, math.e**2) == pytest.approx(
            5.0 * math.exp(-2.0), rel=1e-14
        )

    def test_brute_force_2d(self):
        # independent oracle: 2-D quadrature of the indicator
        n = 4000
        xs = (np.arange(n) + 0.5) / n
        nu = math.e
        count = np.sum(np.add.outer(np.log(xs), np.log(xs)) < -math.log(nu))
        assert product_levelset_exact(2, 1.0, nu) == pytest.approx(count / n**2, rel=1e-3)

    def test_scaling_in_t(self):
        # measure(t, nu) = t^d measure(1, t^d nu)
        d, t, nu = 3, 0.2, 500.0
        assert product_levelset_exact(d, t, nu) == pytest.approx(
            t**d * product_levelset_exact(d, 1.0, t**d * nu), rel=1e-14
        )

    def test_sublevel_inverse(self):
        for d in (1, 2, 4):
            for s in (1e-6, 1e-2, 0.5):
                u = unit_cube_product_sublevel_inverse(d, s)
                assert unit_cube_product_sublevel(d, u) == pytest.approx(s, rel=1e-10)

    def test_bound_check_sweep(self):
        for d in (1, 2, 3, 4):
            ups, lows = [], []
            for t in (1e-3, 1.0, 10.0):
                for nu in np.geomspace(1e-2, 1e10, 49) / t**d:
                    up, low, ok = levelset_bound_check(d, t, nu)
                    ups.append(up)
                    if ok:
                        lows.append(low)
            assert 0.0 < min(lows)
            assert max(ups) < math.inf
        # d = 1 exactness
        up, low, ok = levelset_bound_check(1, 1.0, 7.0)
        assert ok and up == pytest.approx(1.0, rel=1e-14)


class TestGaussianTail:
    def test_d1_against_root_oracle(self):
        nu = 0.3
        xstar = brentq(lambda x: math.exp(-x) / x - nu, 1e-12, 50.0)
        m, err = gaussian_tail_levelset(1, 1.0, 1.0, nu, budget=300_000, seed=3)
        assert m == pytest.approx(xstar, rel=0.01)

    def test_sigma_scaling(self):
        m1, e1 = gaussian_tail_levelset(2, 1.0, 1.0, 0.125, budget=400_000, seed=5)
        m2, e2 = gaussian_tail_levelset(2, 1.0, 2.0, 0.5, budget=400_000, seed=6)
        assert m2 == pytest.approx(m1 / 4.0, rel=0.02)

    def test_bounded_by_levelset_law(self):
        for nu in (0.1, 10.0, 1e4):
            m, err = gaussian_tail_levelset(2, 0.5, 1.0, nu, budget=150_000, seed=7)
            bound = (1.0 / nu) * math.log(2.0 + nu)
            assert m <= 10.0 * bound


class TestPairingInequality:
    def test_hardy_littlewood_spot_check(self):
        rng = np.random.default_rng(12)
        edges = np.linspace(0.0, 1.0, 21)
        for _ in range(50):
            f = rng.uniform(0.0, 5.0, 20)
            g = rng.uniform(0.0, 5.0, 20)
            w = np.diff(edges)
            pair = float(np.sum(f * g * w))
            fstar = np.sort(f)[::-1]
            gstar = np.sort(g)[::-1]
            pair_star = float(np.sum(fstar * gstar * w))
            assert pair <= pair_star + 1e-12


class TestOneDimensionalCurves:
    def test_dist_curve_1d(self):
        curve = dist_curve_1d(lambda x: np.minimum(1.0, x**-0.5), 1e-6, 10.0, [0.5, 0.9])
        # {x : min(1, x^{-1/2}) > lam} = (0, lam^{-2}) for lam < 1
        assert curve.measure[0] == pytest.approx(4.0, rel=1e-6)
        assert curve.measure[1] == pytest.approx(0.9**-2, rel=1e-6)

    def test_field_curve_1d(self):
        xs = np.geomspace(1e-4, 100.0, 2000)
        F = xs**-0.25
        curve = field_curve_1d(xs, F, [0.5, 2.0])
        # the sampled field starts at x = 1e-4, which truncates the level set
        assert curve.measure[1] == pytest.approx(2.0**-4 - 1e-4, rel=1e-3)
        assert curve.measure[0] == pytest.approx(min(0.5**-4, 100.0) - 1e-4, rel=1e-2)


def test_simplex_band_matches_dist():
    # cross-method agreement on a (sum, prod)-dependent field
    from lagheat.constructions import FSigmaField

    fld = FSigmaField(2, 4.0, 1.0, 1.0)
    lams = [0.2, 1.0]
    c1 = simplex_band_curve(fld, 2, lams, budget=400_000, seed=9)
    c2 = dist_fn(fld, ([0.0, 0.0], [40.0, 40.0]), lams, method="monte-carlo",
                 budget=1_000_000, seed=10)
    for a, b in zip(c1.measure, c2.measure):
        assert a == pytest.approx(b, rel=0.05)
