import numpy as np
import pytest
import sympy as sp
from scipy import integrate

from pospart.families import (
    CosineMode, RescaledBump, SineMode, TestFunctions, exact_mode_norms, make_default_bump,
    positive_lobe_integral, rescale_bump, sine_dual_norm_exact,
)

PI = np.pi


def quad(f, a, b, points=()):
    val, _ = integrate.quad(f, a, b, points=list(points) or None, limit=500,
                            epsabs=1e-13, epsrel=1e-12)
    return val


class TestDefaultBump:
    def test_endpoints_and_peak(self):
        phi = make_default_bump()
        assert phi.value(np.array(0.0)) == 0.0
        assert phi.value(np.array(1.0)) == pytest.approx(0.0, abs=1e-30)
        assert phi.value(np.array(0.5)) == pytest.approx(1.0)

    def test_derivative_l1_by_sampling(self):
        phi = make_default_bump()
        t = (np.arange(10000) + 0.5) / 10000
        assert np.mean(np.abs(phi.derivative(t))) == pytest.approx(2.0, abs=1e-4)

    def test_closed_form_norms(self):
        phi = make_default_bump()
        assert quad(phi.value, 0, 1) == pytest.approx(0.5, abs=1e-6)
        assert phi.l1 == pytest.approx(quad(phi.value, 0, 1), rel=1e-10)
        assert phi.l1_derivative == pytest.approx(quad(lambda t: abs(phi.derivative(t)), 0, 1, [0.5]), rel=1e-10)
        assert phi.l2 == pytest.approx(np.sqrt(quad(lambda t: phi.value(t) ** 2, 0, 1)), rel=1e-10)
        assert phi.l2_derivative == pytest.approx(
            np.sqrt(quad(lambda t: phi.derivative(t) ** 2, 0, 1)), rel=1e-10)

    def test_derivative_is_exact(self):
        phi = make_default_bump()
        t = np.linspace(0.05, 0.95, 19)
        h = 1e-6
        fd = (phi.value(t + h) - phi.value(t - h)) / (2 * h)
        np.testing.assert_allclose(phi.derivative(t), fd, rtol=1e-7, atol=1e-8)


class TestRescaledBump:
    def test_n1_support_and_value(self):
        phi = make_default_bump()
        b1 = rescale_bump(phi, 1)
        assert b1.support == (0.5, 1.0)
        assert b1(np.array(0.75)) == pytest.approx(2 * phi.value(np.array(0.5)))
        t = np.linspace(0, 1, 1001)
        assert np.all(b1(t)[t < 0.5] == 0.0)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            rescale_bump(make_default_bump(), 0)

    def test_n3_norms_by_adaptive_quadrature(self):
        phi = make_default_bump()
        b = rescale_bump(phi, 3)
        lo, hi = b.support
        mid = 0.5 * (lo + hi)
        assert quad(b, lo, hi) == pytest.approx(phi.l1, abs=1e-6)
        assert quad(lambda t: abs(b.derivative(t)), lo, hi, [mid]) == pytest.approx(12 * phi.l1_derivative, abs=1e-4)

    @pytest.mark.parametrize("n", [1, 2, 5, 17, 64])
    def test_closed_forms_vs_adaptive_quadrature(self, n):
        b = rescale_bump(make_default_bump(), n)
        lo, hi = b.support
        mid = 0.5 * (lo + hi)
        oracle = (
            quad(b, lo, hi),
            quad(lambda t: abs(b.derivative(t)), lo, hi, [mid]),
            np.sqrt(quad(lambda t: b(t) ** 2, lo, hi)),
            np.sqrt(quad(lambda t: b.derivative(t) ** 2, lo, hi)),
        )
        closed = (b.l1, b.l1_derivative, b.l2, b.l2_derivative)
        np.testing.assert_allclose(closed, oracle, rtol=1e-5)
        np.testing.assert_allclose(b.quadrature_norms(), oracle, rtol=1e-5)

    @pytest.mark.parametrize("n", [1, 4, 30])
    def test_scalings(self, n):
        phi = make_default_bump()
        b = rescale_bump(phi, n)
        s = n * (n + 1)
        assert b.l1 == pytest.approx(phi.l1)
        assert b.l1_derivative == pytest.approx(s * phi.l1_derivative)
        assert b.l2 == pytest.approx(np.sqrt(s) * phi.l2)
        assert b.l2_derivative == pytest.approx(s ** 1.5 * phi.l2_derivative)

    def test_stated_bounds(self):
        phi = make_default_bump()
        for n in range(1, 200):
            b = rescale_bump(phi, n)
            assert b.l1_derivative >= n * n * phi.l1_derivative
            assert b.l2 <= np.sqrt(2) * n * phi.l2 * (1 + 1e-12)
            # the sqrt(2) n^3 constant for the derivative is too small; 2 sqrt(2) n^3 holds
            assert b.l2_derivative <= 2 * np.sqrt(2) * n ** 3 * phi.l2_derivative * (1 + 1e-12)
        assert rescale_bump(phi, 1).l2_derivative > np.sqrt(2) * phi.l2_derivative

    def test_nonnegative_and_supported(self):
        phi = make_default_bump()
        t = np.linspace(-0.5, 1.5, 40001)
        for n in range(1, 65):
            b = rescale_bump(phi, n)
            v = b(t)
            lo, hi = b.support
            assert np.all(v >= 0)
            assert np.all(v[(t < lo) | (t > hi)] == 0.0)
            assert np.all(b.derivative(t)[(t < lo) | (t > hi)] == 0.0)

    def test_support_disjointness(self):
        from fractions import Fraction
        # exact interval arithmetic: slab n+1 ends where slab n starts, and the
        # left ends decrease strictly, so (1/(n+1), 1/n) and (1/(m+1), 1/m) never overlap
        lo = [Fraction(1, n + 1) for n in range(1, 10_001)]
        hi = [Fraction(1, n) for n in range(1, 10_001)]
        for i in range(len(lo) - 1):
            assert lo[i] < hi[i]
            assert hi[i + 1] == lo[i]
            assert lo[i + 1] < lo[i]
        rng = np.random.default_rng(7)
        for n, m in rng.integers(0, 10_000, size=(2000, 2)):
            if n != m:
                assert min(hi[n], hi[m]) <= max(lo[n], lo[m])

    def test_height_exponent(self):
        phi = make_default_bump()
        b = RescaledBump(3, phi, height_exponent=2.0)
        lo, hi = b.support
        assert b.l1 == pytest.approx(quad(b, lo, hi), rel=1e-8)
        assert b.l2_derivative == pytest.approx(
            np.sqrt(quad(lambda t: b.derivative(t) ** 2, lo, hi)), rel=1e-8)


class TestCosineMode:
    def test_endpoints(self):
        for n in range(1, 8):
            m = CosineMode(n)
            assert m(0.0) == 1.0
            assert m(1.0) == pytest.approx((-1) ** n)

    def test_n1_values(self):
        v, h, d = exact_mode_norms(1)
        assert v == pytest.approx(2.33127, abs=1e-5)
        assert v == pytest.approx(2.3311, rel=1e-3)
        assert h == pytest.approx(0.70711, abs=1e-5)
        assert d == pytest.approx(0.21448, abs=1e-5)

    def test_bounds(self):
        for n in range(1, 101):
            v, _, d = exact_mode_norms(n)
            assert v <= n * PI
            assert d <= 1 / (np.sqrt(2) * n * PI)

    def test_product_is_half_symbolically(self):
        n = sp.symbols("n", positive=True, integer=True)
        lam = n ** 2 * sp.pi ** 2 + 1
        assert sp.simplify(sp.sqrt(lam / 2) * 1 / sp.sqrt(2 * lam) - sp.Rational(1, 2)) == 0
        for k in range(1, 50):
            v, _, d = exact_mode_norms(k)
            assert v * d == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 7, 64])
    def test_norms_by_quadrature(self, n):
        m = CosineMode(n)
        knots = np.arange(1, n) / n
        h2 = quad(lambda x: m(x) ** 2, 0, 1, knots)
        g2 = quad(lambda x: m.derivative(x) ** 2, 0, 1, knots)
        assert np.sqrt(h2) == pytest.approx(m.norm_H, rel=1e-8)
        assert np.sqrt(h2 + g2) == pytest.approx(m.norm_V, rel=1e-8)

    def test_riesz_representative_is_scaled_mode(self):
        # z = psi_n / (n^2 pi^2 + 1) solves -z'' + z = psi_n with z'(0) = z'(1) = 0
        x, n = sp.symbols("x n", positive=True)
        psi = sp.cos(n * sp.pi * x)
        z = psi / (n ** 2 * sp.pi ** 2 + 1)
        assert sp.simplify(-sp.diff(z, x, 2) + z - psi) == 0
        assert sp.diff(z, x).subs(x, 0) == 0


class TestLobeIntegrals:
    @pytest.mark.parametrize("n", [1, 2, 17, 64])
    def test_cosine(self, n):
        assert positive_lobe_integral(n) == pytest.approx(1 / PI, abs=1e-6)

    @pytest.mark.parametrize("n", [1, 2, 9])
    def test_sine(self, n):
        assert positive_lobe_integral(n, "sine") == pytest.approx(1 / PI, abs=1e-6)

    def test_oracle_agrees(self):
        n = 17
        knots = (2 * np.arange(n) + 1) / (2 * n)
        assert quad(CosineMode(n).positive, 0, 1, knots) == pytest.approx(1 / PI, abs=1e-9)

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            positive_lobe_integral(1, "tangent")


class TestSineDualNorm:
    @staticmethod
    def series_oracle(n, terms=200_000):
        # ||f||^2 = sum_m (f, e_m)^2 / (1 + m^2 pi^2), e_m = sqrt(2) cos(m pi x);
        # (sin(ax), cos(bx)) = 2a/(a^2 - b^2) for odd m, 0 for even m (a = 2 pi n)
        a = 2 * PI * n
        m = np.arange(1, terms, 2, dtype=np.float64)
        b = m * PI
        c = np.sqrt(2.0) * 2 * a / (a * a - b * b)
        return np.sqrt(np.sum(c * c / (1 + b * b)))

    @pytest.mark.parametrize("n", [1, 3, 64])
    def test_closed_form_vs_series(self, n):
        assert sine_dual_norm_exact(n) == pytest.approx(self.series_oracle(n), rel=1e-6)

    def test_boundary_layer_matters(self):
        naive = 1 / np.sqrt(2 * (4 * PI ** 2 * 64 ** 2 + 1))
        assert sine_dual_norm_exact(64) > 1.5 * naive
        assert SineMode(64).norm_dual <= 0.01


class TestTestFunctions:
    def test_gap_and_norm(self):
        tf = TestFunctions
        gap = quad(lambda x: (tf.v_e(x) - tf.e(x)) ** 2, 0, 1, [0.25, 0.75])
        assert gap == pytest.approx(1 / 6, rel=1e-10)
        assert tf.gap_H_squared == pytest.approx(gap, rel=1e-10)
        vv = quad(lambda x: tf.v_e(x) ** 2 + tf.v_e_derivative(x) ** 2, 0, 1, [0.25, 0.75])
        assert vv == pytest.approx(26 / 3, rel=1e-10)
        assert np.sqrt(tf.norm_V_squared) == pytest.approx(2.944, abs=1e-3)

    def test_shape(self):
        np.testing.assert_allclose(TestFunctions.v_e(np.array([0, 0.125, 0.25, 0.5, 0.75, 1])),
                                   [0, 0.5, 1, 1, 1, 0])
