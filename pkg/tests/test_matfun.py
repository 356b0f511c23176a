import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import arr, random_sym, rel_err, sym_with_norm
from logconf.matfun import (
    DEFAULT_TOLERANCES,
    KernelTolerances,
    bernoulli,
    bernoulli_even,
    dexpm_sym,
    exp_derivative_sandwich,
    expm_pade,
    expm_sym,
    f_coupling,
    f_of_s,
    g_deriv,
    g_of_s,
    hadamard_conjugation,
    hadamard_series,
    logm_sym,
    series_rhs_oracle,
    strain_coupling_closed,
    wilcox_integral_oracle,
    wilcox_sandwich_series,
    wilcox_series,
)
from logconf.tensor2 import SymTensor2, Tensor2, matmul

entries = st.floats(-4, 4, allow_nan=False)


def test_tolerances_validate():
    with pytest.raises(ValueError):
        KernelTolerances(small_x_threshold=0.0)
    with pytest.raises(ValueError):
        KernelTolerances(series_terms=4)


class TestBernoulli:
    def test_examples(self):
        assert bernoulli_even(0) == 1.0
        assert bernoulli(1) == Fraction(-1, 2)
        assert bernoulli_even(1) == pytest.approx(1 / 6, rel=1e-15)
        assert bernoulli_even(2) == pytest.approx(-1 / 30, rel=1e-15)

    def test_odd_numbers_vanish(self):
        assert all(bernoulli(n) == 0 for n in range(3, 50, 2))

    def test_exact_b50_numerator(self):
        assert bernoulli(50) == Fraction(495057205241079648212477525, 66)

    def test_recursion_holds(self):
        for i in range(1, 20):
            total = sum(bernoulli(n) / (math.factorial(n) * math.factorial(i - n + 1)) for n in range(i + 1))
            assert total == 0


class TestExponential:
    def test_examples(self):
        np.testing.assert_array_equal(arr(expm_sym(SymTensor2.zero())), np.eye(2))
        np.testing.assert_allclose(arr(expm_sym(SymTensor2(0.3, 0.0, -2.0))), np.diag(np.exp([0.3, -2.0])), rtol=1e-15)
        b = 1.3
        np.testing.assert_allclose(arr(expm_sym(SymTensor2(0.0, b, 0.0))),
                                   [[np.cosh(b), np.sinh(b)], [np.sinh(b), np.cosh(b)]], rtol=1e-14)

    def test_pade_examples(self):
        np.testing.assert_allclose(arr(expm_pade(Tensor2.zero())), np.eye(2), atol=1e-16)
        np.testing.assert_allclose(arr(expm_pade(Tensor2.identity())), math.e * np.eye(2), rtol=1e-14)

    def test_backends_agree(self, rng):
        for _ in range(300):
            psi = sym_with_norm(rng, rng.uniform(0, 10))
            assert rel_err(expm_pade(psi), expm_sym(psi)) <= 1e-12

    def test_pade_symmetric_output(self, rng):
        for _ in range(100):
            a = arr(expm_pade(random_sym(rng, 4.0)))
            assert abs(a[0, 1] - a[1, 0]) <= 1e-13 * np.abs(a).max()

    def test_pade_general_matrix(self, rng):
        from scipy.linalg import expm
        for _ in range(50):
            x = rng.normal(size=(2, 2)) * 2
            assert np.linalg.norm(arr(expm_pade(Tensor2.from_array(x))) - expm(x)) <= 1e-12 * np.linalg.norm(expm(x))

    @given(entries, entries, entries)
    def test_positive_definite(self, a, b, c):
        s = expm_sym(SymTensor2(a, b, c))
        assert s.trace() > 0 and s.det() > 0 and s.xx > 0
        # det = xx*yy - xy^2 cancels; bound the error by the size of the products
        scale = abs(s.xx * s.yy) + s.xy ** 2
        assert abs(s.det() - math.exp(a + c)) <= 1e-12 * scale

    def test_inverse(self, rng):
        for _ in range(100):
            psi = random_sym(rng, 3.0)
            for back in (expm_sym, expm_pade):
                prod = matmul(back(psi), back(-psi))
                np.testing.assert_allclose(arr(prod), np.eye(2), atol=1e-12)

    def test_logarithm_roundtrip(self, rng):
        for _ in range(100):
            psi = random_sym(rng, 3.0)
            assert rel_err(logm_sym(expm_sym(psi)), psi) <= 1e-11 or np.linalg.norm(arr(psi)) < 1e-12

    def test_logarithm_rejects_indefinite(self):
        with pytest.raises(ValueError):
            logm_sym(SymTensor2(1.0, 2.0, 1.0))


class TestCouplingFunctions:
    def test_f_examples(self):
        assert f_coupling(SymTensor2.zero()) == pytest.approx(1 / 3, rel=1e-15)
        assert f_coupling(SymTensor2(1.0, 0.0, -1.0)) == pytest.approx(2 / (math.e**2 - 1), rel=1e-14)

    def test_g_examples(self):
        assert g_deriv(SymTensor2.zero()) == pytest.approx(1 / 6, rel=1e-15)
        assert g_deriv(SymTensor2(1.0, 0.0, -1.0)) == pytest.approx(math.sinh(1) - 1, rel=1e-14)
        assert g_deriv(SymTensor2(3.0, 0.0, -3.0)) == pytest.approx((math.sinh(3) - 3) / 27, rel=1e-14)
        # decimal value of the closed form at x = 3
        assert g_deriv(SymTensor2(3.0, 0.0, -3.0)) == pytest.approx(0.2599213, abs=1e-7)

    def test_f_matches_bernoulli_series(self, rng):
        for x in rng.uniform(0, math.pi / 2, 200):
            series = sum(bernoulli_even(n) / math.factorial(2 * n) * 4**n * x ** (2 * (n - 1)) for n in range(1, 26))
            assert f_coupling(SymTensor2(x, 0.0, -x)) == pytest.approx(series, rel=1e-12)

    @pytest.mark.parametrize("fn", [f_of_s, g_of_s])
    def test_continuous_across_switch(self, fn):
        thr = DEFAULT_TOLERANCES.small_x_threshold
        s0 = thr**2
        below, above = fn(s0 * (1 - 1e-14)), fn(s0 * (1 + 1e-14))
        assert abs(below[0] - above[0]) < 1e-12
        assert abs(below[1] - above[1]) < 1e-12

    @pytest.mark.parametrize("fn", [f_of_s, g_of_s])
    def test_derivative_matches_difference(self, fn):
        for s in (1e-6, 0.1, 0.2499, 0.2501, 2.0, 30.0):
            h = 1e-6 * max(s, 1e-3)
            fd = (fn(s + h)[0] - fn(s - h)[0]) / (2 * h)
            assert fn(s)[1] == pytest.approx(fd, rel=1e-6, abs=1e-10)

    def test_large_argument_stays_finite(self):
        f, df = f_of_s(800.0**2)
        g, dg = g_of_s(600.0**2)
        assert np.isfinite([f, df, g, dg]).all()


class TestStrainCoupling:
    def test_trivial_cases(self, rng):
        eps = random_sym(rng)
        np.testing.assert_allclose(arr(strain_coupling_closed(SymTensor2.zero(), eps)), 2 * arr(eps))
        d = SymTensor2(0.4, 0.0, -1.1)
        e = SymTensor2(2.0, 0.0, 0.3)
        np.testing.assert_allclose(arr(strain_coupling_closed(d, e)), 2 * arr(e))

    def test_series_examples(self, rng):
        eps = random_sym(rng)
        np.testing.assert_array_equal(arr(series_rhs_oracle(SymTensor2.zero(), eps, 10)), arr(eps))
        np.testing.assert_array_equal(arr(series_rhs_oracle(random_sym(rng), eps, 0)), arr(eps))
        out = series_rhs_oracle(SymTensor2(1.0, 0.0, -1.0), SymTensor2(0.0, 1.0, 0.0), 25)
        np.testing.assert_allclose(arr(out), [[0, 1 / math.tanh(1)], [1 / math.tanh(1), 0]], rtol=1e-13)

    def test_series_rejects_outside_radius(self):
        with pytest.raises(ValueError):
            series_rhs_oracle(SymTensor2(math.pi, 0.0, 0.0), SymTensor2.identity(), 5)

    def test_closed_form_matches_series(self, rng):
        for _ in range(300):
            psi = sym_with_norm(rng, rng.uniform(0, 2.5))
            eps = random_sym(rng, 2.0)
            assert rel_err(strain_coupling_closed(psi, eps), series_rhs_oracle(psi, eps, 25) * 2.0) <= 1e-10


class TestExponentialDerivative:
    def test_trivial_cases(self, rng):
        d = random_sym(rng)
        np.testing.assert_allclose(arr(exp_derivative_sandwich(SymTensor2.zero(), d)), arr(d))
        np.testing.assert_allclose(arr(exp_derivative_sandwich(SymTensor2(1.0, 0.0, 0.2), SymTensor2(-0.4, 0.0, 3.0))),
                                   [[-0.4, 0.0], [0.0, 3.0]])

    def test_matches_finite_differences(self, rng):
        h = 1e-6
        for _ in range(500):
            psi, d = random_sym(rng, 2.0), random_sym(rng)
            fd = (arr(expm_sym(psi + d * h)) - arr(expm_sym(psi - d * h))) / (2 * h)
            assert np.abs(arr(dexpm_sym(psi, d)) - fd).max() <= 1e-6


class TestAppendixOracles:
    def test_wilcox_trivial_cases(self, rng):
        y = Tensor2(*rng.normal(size=4))
        np.testing.assert_allclose(arr(wilcox_integral_oracle(Tensor2.zero(), y)), arr(y), atol=1e-15)
        x = SymTensor2(0.7, 0.0, -0.2)
        yd = SymTensor2(1.5, 0.0, 2.0)
        np.testing.assert_allclose(arr(wilcox_integral_oracle(x, yd)), arr(matmul(yd, expm_sym(x))), rtol=1e-13)

    def test_wilcox_rejects_few_points(self):
        with pytest.raises(ValueError):
            wilcox_integral_oracle(Tensor2.zero(), Tensor2.identity(), npts=4)

    def test_wilcox_series(self, rng):
        for _ in range(100):
            x, y = sym_with_norm(rng, rng.uniform(0, 2.5)), random_sym(rng)
            quad = wilcox_integral_oracle(x, y, 32)
            assert rel_err(quad, wilcox_series(x, y, 25)) <= 1e-9
            assert rel_err(quad, wilcox_sandwich_series(x, y, 25)) <= 1e-9

    def test_hadamard(self, rng):
        y = Tensor2(*rng.normal(size=4))
        np.testing.assert_allclose(arr(hadamard_conjugation(Tensor2.zero(), y)), arr(y), atol=1e-15)
        d = SymTensor2(0.3, 0.0, 1.0)
        e = SymTensor2(-2.0, 0.0, 0.5)
        np.testing.assert_allclose(arr(hadamard_conjugation(d, e)), arr(e), atol=1e-14)
        for _ in range(200):
            x = Tensor2(*rng.normal(size=4))
            x = x * (rng.uniform(0, 2) / float(x.frobenius()))
            y = Tensor2(*rng.normal(size=4))
            assert rel_err(hadamard_series(x, y, 25), hadamard_conjugation(x, y)) <= 1e-10

    def test_analytic_continuation(self, rng):
        for _ in range(200):
            psi = sym_with_norm(rng, rng.uniform(math.pi + 1e-6, 6.0))
            eps = random_sym(rng, 2.0)
            a = strain_coupling_closed(psi, eps) * 0.5
            sigma = expm_sym(psi)
            ref = (matmul(eps, sigma) + matmul(sigma, eps)) * 0.5
            assert rel_err(wilcox_integral_oracle(psi, a, 32), ref) <= 1e-8


@settings(max_examples=100)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=6, max_size=6))
def test_sandwich_is_symmetric_and_linear(v):
    psi, d = SymTensor2(*v[:3]), SymTensor2(*v[3:])
    a = arr(exp_derivative_sandwich(psi, d * 2.0))
    b = arr(exp_derivative_sandwich(psi, d))
    np.testing.assert_allclose(a, 2 * b, rtol=1e-13, atol=1e-13)
