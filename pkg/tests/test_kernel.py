"""Kernel oracles: direct formula values, symmetry, the comparison pieces in
their regimes, envelope behavior, lower-bound windows, the semigroup
composition law and the eigen-relation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lagheat.kernel import (
    EnvelopeConstants,
    KernelParams1D,
    TypeMultiIndex,
    calibrate_envelope,
    d_piece,
    e_piece,
    h1d,
    h_product,
    log_h1d,
    lower_bound_a,
    lower_bound_b,
    upper_envelope,
)
from lagheat.special import laguerre_fn


def closed_form_h(a_half_int, t, xi, eta):
    """Direct kernel formula using the half-integer Bessel closed form."""
    s = math.sinh(t)
    z = math.sqrt(xi * eta) / s
    if a_half_int == -0.5:
        bess = math.sqrt(2.0 / (math.pi * z)) * math.cosh(z)
    else:
        bess = math.sqrt(2.0 / (math.pi * z)) * math.sinh(z)
    return (
        math.exp((1.0 + a_half_int) * t)
        / (2.0 * s)
        * math.exp(-0.5 * (1.0 / math.tanh(t)) * (xi + eta))
        * bess
    )


class TestKernelValues:
    def test_direct_formula_oracle(self):
        p = KernelParams1D(-0.5, 0.5)
        assert h1d(p, 1.0, 1.0) == pytest.approx(closed_form_h(-0.5, 0.5, 1.0, 1.0), rel=1e-12)
        p2 = KernelParams1D(0.5, 0.17)
        assert h1d(p2, 2.0, 0.3) == pytest.approx(closed_form_h(0.5, 0.17, 2.0, 0.3), rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(-4, 2),
        st.floats(-6, 3),
        st.floats(-6, 3),
        st.floats(-0.95, 2.5),
    )
    def test_symmetry_exact(self, lt, lx, ly, a):
        p = KernelParams1D(a, math.exp(lt))
        x, y = math.exp(lx), math.exp(ly)
        assert h1d(p, x, y) == h1d(p, y, x)

    def test_positivity_and_underflow(self):
        p = KernelParams1D(-0.5, 0.5)
        assert h1d(p, 0.3, 1.7) > 0
        # doubly exponential decay may underflow to exactly zero: documented
        assert h1d(KernelParams1D(-0.5, 1e-3), 1e-4, 500.0) == 0.0

    def test_product_structure(self):
        alpha = TypeMultiIndex([-0.5, 0.3])
        rng = np.random.default_rng(3)
        for _ in range(50):
            t = float(np.exp(rng.uniform(-3, 1)))
            x = np.exp(rng.uniform(-3, 2, 2))
            y = np.exp(rng.uniform(-3, 2, 2))
            want = h1d(KernelParams1D(-0.5, t), x[0], y[0]) * h1d(
                KernelParams1D(0.3, t), x[1], y[1]
            )
            assert h_product(alpha, t, x, y) == pytest.approx(want, rel=1e-12)
            assert h_product(alpha, t, x, y) > 0

    def test_d1_reduces_to_h1d(self):
        alpha = TypeMultiIndex([-0.5])
        assert h_product(alpha, 0.7, [1.1], [0.4]) == pytest.approx(
            h1d(KernelParams1D(-0.5, 0.7), 1.1, 0.4), rel=1e-14
        )


class TestComparisonPieces:
    def test_e_piece_two_forms_agree(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = float(rng.uniform(-0.9, 2.0))
            t = float(np.exp(rng.uniform(-4, 0)))
            x, y = np.exp(rng.uniform(-2, 3, 2))
            p = KernelParams1D(a, t)
            assert e_piece(p, x, y, True) == pytest.approx(
                e_piece(p, x, y, False), rel=1e-8
            )

    def test_regime_comparability(self):
        rng = np.random.default_rng(7)
        ratios_d, ratios_e = [], []
        for _ in range(10_000):
            a = -0.5
            t = float(np.exp(rng.uniform(-5, 0)))
            x, y = np.exp(rng.uniform(-5, 2, 2))
            p = KernelParams1D(a, t)
            k = h1d(p, x, y)
            if k == 0.0:
                continue
            if math.sqrt(x * y) <= math.sinh(t):
                ratios_d.append(k / d_piece(p, x, y))
            else:
                ratios_e.append(k / e_piece(p, x, y))
        for ratios in (ratios_d, ratios_e):
            assert len(ratios) > 100
            assert 0.0 < min(ratios) and max(ratios) < math.inf
            assert max(ratios) / min(ratios) < 50.0


class TestEnvelope:
    def test_large_t_equals_t_one(self):
        p1 = KernelParams1D(-0.5, 2.0)
        p2 = KernelParams1D(-0.5, 1.0)
        assert upper_envelope(p1, 0.7, 1.3) == upper_envelope(p2, 0.7, 1.3)

    def test_second_term_scale_at_diagonal(self):
        # at xi = eta = t the second term is t^{a} e^{-2 c2} (up to the first)
        a, t = -0.5, 0.3
        c = EnvelopeConstants()
        term2 = t**a * math.exp(-2.0 * c.c2)
        p = KernelParams1D(a, t)
        assert upper_envelope(p, t, t) >= term2

    def test_calibration_bounds_kernel(self):
        fit = calibrate_envelope(-0.5, n=20_000, seed=1)
        assert 0 < fit.c_upper < math.inf
        assert fit.c_lower_a and fit.c_lower_a > 0
        assert fit.c_lower_b and fit.c_lower_b > 0
        rng = np.random.default_rng(11)
        for _ in range(2000):
            t = float(np.exp(rng.uniform(math.log(1e-3), 0.0)))
            x, y = np.exp(rng.uniform(math.log(1e-3), math.log(1e2), 2))
            p = KernelParams1D(-0.5, t)
            assert h1d(p, x, y) <= 1.05 * fit.c_upper * upper_envelope(p, x, y)


class TestLowerBounds:
    def test_regime_a_window(self):
        p = KernelParams1D(-0.5, 0.1)
        assert lower_bound_a(p, 5.0, 5.5) == 1.0
        assert h1d(p, 5.0, 5.5) > 0.01  # comparably sized, c fitted elsewhere

    def test_regime_b_window(self):
        p = KernelParams1D(-0.5, 1.0)
        lb = lower_bound_b(p, 0.01, 0.01)
        assert lb == pytest.approx((0.01 * 0.01) ** -0.25, rel=1e-12)
        assert h1d(p, 0.01, 0.01) / lb > 0.05

    def test_both_absent_outside(self):
        p = KernelParams1D(-0.5, 0.5)
        assert lower_bound_a(p, 100.0, 100.0) is None
        assert lower_bound_b(p, 100.0, 0.1) is None

    def test_window_gates(self):
        # t > 1/4 disables (a); t > 1 disables (b)
        assert lower_bound_a(KernelParams1D(0.0, 0.3), 2.0, 2.1) is None
        assert lower_bound_b(KernelParams1D(0.0, 1.5), 0.1, 0.1) is None


class TestSemigroupStructure:
    @pytest.mark.parametrize("a", [-0.5, 0.0, 1.0])
    def test_chapman_kolmogorov(self, a):
        for s1, s2 in [(0.1, 0.1), (0.1, 0.3), (0.3, 0.3)]:
            for xi, eta in [(0.4, 1.1), (2.0, 2.5)]:
                val, _ = quad(
                    lambda z: math.exp(log_h1d(a, s1, xi, z) + log_h1d(a, s2, z, eta)),
                    0.0,
                    60.0,
                    limit=300,
                    points=[xi, eta],
                )
                want = float(np.exp(log_h1d(a, s1 + s2, xi, eta)))
                assert val == pytest.approx(want, rel=1e-4)

    @pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
    def test_eigen_relation(self, k):
        a, s, xi = -0.5, 0.25, 1.3
        val, _ = quad(
            lambda e: math.exp(log_h1d(a, s, xi, e)) * laguerre_fn(k, a, e),
            0.0,
            80.0,
            limit=400,
            points=[xi],
        )
        want = math.exp(-2.0 * s * k) * laguerre_fn(k, a, xi)
        assert val == pytest.approx(want, rel=1e-4, abs=1e-10)


class TestTypeMultiIndex:
    def test_derived_quantities(self):
        al = TypeMultiIndex([-0.5, 0.2, -0.5])
        assert al.tilde_alpha == -0.5
        assert al.tilde_d() == 2
        assert al.d == 3

    def test_min_tol_counting(self):
        al = TypeMultiIndex([-0.5, -0.499, 1.0])
        assert al.tilde_d() == 1
        assert al.tilde_d(min_tol=0.01) == 2

    def test_validation(self):
        with pytest.raises(ValueError):
            TypeMultiIndex([-1.0])
        with pytest.raises(ValueError):
            TypeMultiIndex([])
        with pytest.raises(ValueError):
            KernelParams1D(-1.2, 0.5)
        with pytest.raises(ValueError):
            KernelParams1D(0.0, -0.5)
