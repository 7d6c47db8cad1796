"""Operator engine: kernel pairings against an independent quadrature
oracle, tensorization, the semigroup law and approximate identity, the
eigenfunction series cross-check, maximal-operator properties, the centered
maximal operator, and the one-dimensional pointwise bound."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from lagheat.functions import (
    Box,
    GridFn,
    PowerExp,
    SeparableFunction,
    SignedFunctionError,
)
from lagheat.kernel import TypeMultiIndex, log_h1d
from lagheat.semigroup import (
    TimeGrid,
    apply_kernel,
    apply_semigroup,
    critical_exponents_1d,
    hl_maximal_1d,
    kernel_pairing_1d,
    lp_norm,
    maximal,
    proposition_rhs,
)
from lagheat.special import laguerre_fn, log_gamma

A = TypeMultiIndex([-0.5])
BOX = SeparableFunction.indicator_box([0.5], [1.0])


def laguerre0(a):
    c = math.exp(-0.5 * log_gamma(a + 1.0))
    return SeparableFunction([(c, (PowerExp(0.5 * a, 0.5),))])


class TestPairingOracle:
    @pytest.mark.parametrize(
        "a,t,xi,lo,hi",
        [
            (-0.5, 0.3, 0.7, 0.5, 1.0),
            (-0.9, 0.02, 1.0, 0.0, 2.0),
            (0.7, 1.5, 3.0, 0.1, 10.0),
            (-0.5, 0.001, 0.01, 0.0, 0.05),
        ],
    )
    def test_box_pairing_vs_scipy(self, a, t, xi, lo, hi):
        got = kernel_pairing_1d(a, t, xi, Box(lo, hi) if lo > 0 else Box(1e-300, hi))
        want, _ = quad(
            lambda e: math.exp(log_h1d(a, t, xi, e)),
            max(lo, 1e-12),
            hi,
            limit=400,
            points=[xi] if lo < xi < hi else None,
        )
        assert got == pytest.approx(want, rel=2e-6)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_powexp_pairing_vs_scipy(self):
        a, t, xi = -0.5, 0.4, 1.2
        piece = PowerExp(-0.25, 0.5)
        got = kernel_pairing_1d(a, t, xi, piece)
        want, _ = quad(
            lambda e: math.exp(log_h1d(a, t, xi, e)) * e**-0.25 * math.exp(-0.5 * e),
            0.0,
            80.0,
            limit=400,
            points=[xi],
        )
        assert got == pytest.approx(want, rel=2e-6)

    def test_gridfn_pairing(self):
        xs = np.linspace(0.2, 2.0, 60)
        g = GridFn(xs, np.sin(xs) ** 2 + 0.1)
        got = kernel_pairing_1d(-0.5, 0.3, 0.9, g)
        want, _ = quad(
            lambda e: math.exp(log_h1d(-0.5, 0.3, 0.9, e)) * float(g.value(e)),
            0.2,
            2.0,
            limit=400,
        )
        assert got == pytest.approx(want, rel=1e-4)


class TestApplyKernel:
    def test_eigenprofile_fixed_point(self):
        f0 = laguerre0(-0.5)
        for t in (0.1, 1.0):
            v = apply_kernel(A, t, f0, [1.3])
            assert v == pytest.approx(laguerre_fn(0, -0.5, 1.3), rel=1e-5)

    def test_indicator_uniformly_bounded_nonneg_type(self):
        # at type 0 the maximal integral of the constant is uniformly bounded
        one = SeparableFunction.indicator_box([0.0], [5e3])
        alpha0 = TypeMultiIndex([0.0])
        vals = [
            apply_kernel(alpha0, t, one, [x])
            for t in (1e-3, 0.1, 1.0, 10.0)
            for x in (1e-3, 0.5, 7.0, 50.0)
        ]
        assert max(vals) < 3.0

    def test_tensorization(self):
        for d in (2, 3, 4):
            alpha = TypeMultiIndex([-0.5] * d)
            f = SeparableFunction.cube(d, 0.5, 1.0)
            x = np.geomspace(0.2, 1.0, d)
            prod = 1.0
            for i in range(d):
                prod *= kernel_pairing_1d(-0.5, 0.3, x[i], Box(0.5, 1.0))
            assert apply_kernel(alpha, 0.3, f, x) == pytest.approx(prod, rel=1e-10)

    def test_signed_multi_term_rejected(self):
        f = SeparableFunction([(1.0, (Box(0, 1),)), (-1.0, (Box(2, 3),))])
        with pytest.raises(SignedFunctionError):
            apply_kernel(A, 0.5, f, [1.0])
        # but the linear semigroup accepts it
        assert np.isfinite(apply_semigroup(A, 0.5, f, [1.0]))


class TestSemigroup:
    def test_eigen_decay(self):
        # detailed per-k decay is covered by the eigen-decay scenario; spot-check k=2
        from lagheat.experiments import _laguerre_separable

        a = -0.5
        f2 = _laguerre_separable(2, a)
        got = apply_semigroup(TypeMultiIndex([a]), 0.5, f2, [0.8])
        want = math.exp(-0.5 * (2 + 0.25)) * laguerre_fn(2, a, 0.8)
        assert got == pytest.approx(want, rel=1e-4)

    def test_approximate_identity(self):
        f = SeparableFunction([(1.0, (PowerExp(2.0, 1.0),))])  # smooth bump x^2 e^{-x}
        x = 2.0
        got = apply_semigroup(A, 1e-3, f, [x])
        want = x**2 * math.exp(-x)
        assert abs(got / want - 1.0) < 0.01

    def test_semigroup_law_via_grid_function(self):
        # realize T_s f on a grid deep enough to carry its y^{a/2} head
        s, t = 0.2, 0.5
        f = BOX
        ys = np.geomspace(1e-6, 80.0, 500)
        tsf = np.array([apply_semigroup(A, s, f, [y]) for y in ys])
        g = SeparableFunction([(1.0, (GridFn(ys, np.maximum(tsf, 0.0)),))])
        for x in (0.4, 1.1):
            lhs = apply_semigroup(A, t, g, [x])
            rhs = apply_semigroup(A, s + t, f, [x])
            assert lhs == pytest.approx(rhs, rel=1e-3)

    def test_series_vs_integral(self):
        # truncated eigenfunction expansion against the integral form
        a, t = 0.0, 0.5
        alpha = TypeMultiIndex([a])
        f = SeparableFunction.indicator_box([0.5], [1.0])
        xs = [0.3, 0.7, 1.5]
        for x in xs:
            series = 0.0
            for n in range(41):
                cn, _ = quad(lambda e: laguerre_fn(n, a, e), 0.5, 1.0, limit=200)
                series += math.exp(-t * (n + 0.5 * (a + 1.0))) * cn * laguerre_fn(n, a, x)
            integral = apply_semigroup(alpha, t, f, [x])
            assert series == pytest.approx(integral, rel=1e-3)


class TestMaximal:
    def test_dominates_each_grid_point(self):
        grid = TimeGrid(1e-3, 10.0, 16, 1)
        res = maximal(A, BOX, [0.3], grid)
        for t0 in (1e-3, 0.1, 1.0, 10.0):
            assert res.value >= apply_kernel(A, t0, BOX, [0.3]) - 1e-12

    def test_corner_lower_bound(self):
        grid = TimeGrid(1e-3, 50.0, 16, 1)
        cs = []
        for x in np.geomspace(1e-4, 1e-1, 4):
            res = maximal(A, BOX, [x], grid)
            cs.append(res.value * x**0.25)
        assert min(cs) > 0.05
        # stability of the fitted constant under grid refinement
        grid2 = TimeGrid(1e-3, 50.0, 32, 2)
        cs2 = [maximal(A, BOX, [x], grid2).value * x**0.25 for x in np.geomspace(1e-4, 1e-1, 4)]
        assert max(abs(a / b - 1.0) for a, b in zip(cs, cs2)) < 0.05

    def test_self_convergence_under_grid_doubling(self):
        xs = np.geomspace(1e-3, 30.0, 20)
        v32 = [maximal(A, BOX, [x], TimeGrid(1e-4, 1e2, 32, 1)).value for x in xs]
        v64 = [maximal(A, BOX, [x], TimeGrid(1e-4, 1e2, 64, 1)).value for x in xs]
        rel = max(abs(b / a - 1.0) for a, b in zip(v32, v64))
        assert rel < 0.005

    def test_monotone_under_refinement(self):
        xs = [0.01, 0.5, 3.0]
        for x in xs:
            lo = maximal(A, BOX, [x], TimeGrid(1e-3, 10.0, 16, 0)).value
            hi = maximal(A, BOX, [x], TimeGrid(1e-3, 10.0, 16, 3)).value
            assert hi >= lo - 1e-15

    def test_argmax_stable_under_extra_refinement(self):
        grid1 = TimeGrid(1e-3, 10.0, 32, 2)
        grid2 = TimeGrid(1e-3, 10.0, 32, 4)
        cell = math.log(10.0) / 32.0
        for x in (0.05, 0.8):
            t1 = maximal(A, BOX, [x], grid1).argmax_t
            t2 = maximal(A, BOX, [x], grid2).argmax_t
            assert abs(math.log(t1 / t2)) <= cell + 1e-9

    def test_dominates_semigroup_sup(self):
        # sup_t of the raw kernel integral dominates sup_t of the semigroup
        grid = TimeGrid(1e-3, 10.0, 16, 1)
        x = [0.3]
        hstar = maximal(A, BOX, x, grid).value
        tstar = max(apply_semigroup(A, t, BOX, x, absolute=True) for t in grid.grid())
        assert hstar >= tstar - 1e-12

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(1.0, 0.5)
        with pytest.raises(ValueError):
            TimeGrid(1e-3, 1.0, points_per_decade=8)


class TestHLMaximal:
    def test_box_inside(self):
        f = SeparableFunction.indicator_box([0.0], [1.0])
        assert hl_maximal_1d(f, 0.5) == 1.0

    def test_box_outside_exact(self):
        f = SeparableFunction.indicator_box([0.0], [1.0])
        assert hl_maximal_1d(f, 2.0) == pytest.approx(0.25, rel=1e-12)

    def test_dominates_pointwise(self):
        f = laguerre0(-0.5)
        for x in (0.3, 1.0, 2.5):
            assert hl_maximal_1d(f, x) >= float(f.evaluate(np.array([[x]]))[0]) - 1e-12

    def test_multi_term(self):
        f = SeparableFunction([(1.0, (Box(0.0, 1.0),)), (2.0, (Box(3.0, 4.0),))])
        # at x = 2 the best window reaches both boxes
        got = hl_maximal_1d(f, 2.0)
        want = max((1.0 + 2.0 * 1.0) / (2 * 2.0), 2.0 / (2 * 2.0), 1.0 / (2 * 1.0))
        assert got == pytest.approx(want, rel=1e-3)


class TestNormsAndBound:
    def test_lp_norm_box(self):
        assert lp_norm(SeparableFunction.indicator_box([0.0], [1.0]), 4.0) == 1.0

    def test_lp_norm_powexp_closed_form(self):
        f = SeparableFunction([(1.0, (PowerExp(-0.2, 0.0, 0.0, 1.0),))])
        want = (1.0 / (1.0 - 0.8)) ** 0.25  # int x^{-0.8} = 1/0.2
        assert lp_norm(f, 4.0) == pytest.approx(want, rel=1e-12)

    def test_lp_norm_divergence(self):
        from lagheat.functions import NormDivergenceError

        f = laguerre0(-0.5)  # x^{-1/4} profile: 4th power is x^{-1}, divergent
        with pytest.raises(NormDivergenceError):
            lp_norm(f, 4.0)

    def test_exponents(self):
        p0, p1 = critical_exponents_1d(-0.5)
        assert p1 == 4.0 and p0 == pytest.approx(4.0 / 3.0, rel=1e-15)
        with pytest.raises(ValueError):
            critical_exponents_1d(0.1)

    def test_proposition_tail_power(self):
        # for tiny xi at t = 1 the second term dominates with xi^{-1/p1}
        f = SeparableFunction.indicator_box([0.0], [1.0])
        a = -0.5
        v1 = proposition_rhs(a, 1.0, f, 1e-5)
        v2 = proposition_rhs(a, 1.0, f, 1e-7)
        slope = math.log(v2 / v1) / math.log(1e-7 / 1e-5)
        assert slope == pytest.approx(-0.25, abs=0.02)

    def test_proposition_homogeneity(self):
        f = SeparableFunction.indicator_box([0.0], [1.0])
        f2 = SeparableFunction.indicator_box([0.0], [1.0], coeff=2.0)
        a, t, xi = -0.5, 0.3, 0.8
        assert proposition_rhs(a, t, f2, xi) == pytest.approx(
            2.0 * proposition_rhs(a, t, f, xi), rel=1e-9
        )
        assert apply_kernel(TypeMultiIndex([a]), t, f2, [xi]) == pytest.approx(
            2.0 * apply_kernel(TypeMultiIndex([a]), t, f, [xi]), rel=1e-12
        )

    def test_proposition_t_capped_at_one(self):
        f = SeparableFunction.indicator_box([0.0], [1.0])
        assert proposition_rhs(-0.5, 3.0, f, 0.7) == proposition_rhs(-0.5, 1.0, f, 0.7)

    def test_proposition_dominates_kernel_integral(self):
        f = SeparableFunction.indicator_box([0.0], [1.0])
        worst = 0.0
        for t in (1e-2, 0.1, 1.0):
            for xi in (1e-2, 0.5, 5.0, 50.0):
                lhs = apply_kernel(A, t, f, [xi])
                rhs = proposition_rhs(-0.5, t, f, xi)
                worst = max(worst, lhs / rhs)
        assert worst < 2.0
