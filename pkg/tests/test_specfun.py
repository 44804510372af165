import math

import numpy as np
import pytest
from scipy import integrate

from fracpoisson.errors import AccuracyError
from fracpoisson.specfun import (
    EULER_GAMMA,
    ZETA3,
    EvalControl,
    erfc,
    log_gamma_series_coeffs,
    mittag_leffler,
    mittag_leffler_deriv,
    mittag_leffler_two_param,
    zeta,
)
from fracpoisson.stable import StableLaw, stable_pdf

# frozen high-precision references (mpmath, 50+ digits)
E07_M3 = 0.13789710966502707183  # E_0.7(-3)
E0909_M2 = 0.11059802429320848080  # E_{0.9,0.9}(-2)
E06_D3_M2 = 0.10046528839525187355  # third derivative of E_0.6 at -2
ERFC1 = 0.15729920705028513066


def rel(a, b):
    return abs(a / b - 1.0)


class TestMittagLeffler:
    def test_exponential_case(self):
        assert rel(mittag_leffler(1.0, -1.0), math.exp(-1)) < 1e-14

    def test_at_zero(self):
        for nu in (0.05, 0.3, 0.5, 0.99, 1.0):
            assert mittag_leffler(nu, 0.0) == 1.0

    def test_half_erfc(self):
        assert rel(mittag_leffler(0.5, -1.0), math.e * ERFC1) < 1e-13
        assert abs(mittag_leffler(0.5, -1.0) - 0.427584) < 1e-6

    def test_nu07_reference(self):
        assert rel(mittag_leffler(0.7, -3.0), E07_M3) < 1e-12

    def test_nu07_stable_integral_route(self):
        # E_nu(-x) = int_0^inf g_nu(s) exp(-x s^-nu) ds
        law = StableLaw(0.7)

        def f(s):
            return float(stable_pdf(law, s)) * math.exp(-3.0 * s**-0.7)

        val = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-11, limit=200)[0]
                  for a, b in ((0, 0.2), (0.2, 1), (1, 10), (10, np.inf)))
        assert rel(val, E07_M3) < 1e-8

    def test_matches_exp_on_range(self):
        z = np.linspace(-30, 5, 141)
        got = mittag_leffler(1.0, z)
        assert np.max(np.abs(got / np.exp(z) - 1)) < 1e-10

    @pytest.mark.parametrize("nu", [0.1, 0.3, 0.5, 0.75, 0.95])
    def test_decreasing_and_bounded(self, nu):
        x = np.concatenate([np.linspace(0, 5, 51), np.geomspace(5.1, 500, 60)])
        v = mittag_leffler(nu, -x)
        assert np.all(np.diff(v) < 0)
        assert np.all((v > 0) & (v <= 1))

    def test_large_argument_tail(self):
        # E_nu(-x) ~ x^-1 / Gamma(1 - nu) + O(x^-2)
        nu, x = 0.6, 1e4
        lead = 1 / (x * math.gamma(1 - nu)) - 1 / (x * x * math.gamma(1 - 2 * nu))
        assert rel(mittag_leffler(nu, -x), lead) < 1e-6

    def test_vector_matches_scalar(self):
        z = np.array([-40.0, -3.0, 0.0, 0.7])
        v = mittag_leffler(0.45, z)
        assert v.shape == z.shape
        for zi, vi in zip(z, v):
            assert vi == mittag_leffler(0.45, float(zi))

    def test_bad_order(self):
        with pytest.raises(ValueError):
            mittag_leffler(0.0, -1.0)
        with pytest.raises(ValueError):
            mittag_leffler(1.2, -1.0)


class TestTwoParameter:
    def test_exponential(self):
        assert rel(mittag_leffler_two_param(1, 1, 0.5), math.exp(0.5)) < 1e-15

    def test_half_half(self):
        want = 1 / math.sqrt(math.pi) - math.e * ERFC1
        assert rel(mittag_leffler_two_param(0.5, 0.5, -1.0), want) < 1e-12
        assert abs(want - 0.136606) < 1e-6

    def test_reference(self):
        assert rel(mittag_leffler_two_param(0.9, 0.9, -2.0), E0909_M2) < 1e-12

    @pytest.mark.parametrize("nu", [0.2, 0.5, 0.8])
    def test_beta_one_consistency(self, nu):
        for z in (-25.0, -4.0, -0.5, 0.0, 1.5):
            assert mittag_leffler_two_param(nu, 1.0, z) == mittag_leffler(nu, z)

    def test_recurrence(self):
        # E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)
        a, b = 0.6, 0.8
        for z in (-3.0, -0.4, 0.9):
            lhs = mittag_leffler_two_param(a, b, z)
            rhs = 1 / math.gamma(b) + z * mittag_leffler_two_param(a, a + b, z)
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    def test_large_negative_half_half(self):
        # E_{1/2,1/2}(-z) = 1/sqrt(pi) - z exp(z^2) erfc(z)
        for z in (3.0, 8.0, 20.0):
            from scipy.special import erfcx

            want = 1 / math.sqrt(math.pi) - z * erfcx(z)
            assert abs(mittag_leffler_two_param(0.5, 0.5, -z) - want) < 1e-12


class TestDerivative:
    def test_exponential(self):
        assert rel(mittag_leffler_deriv(1.0, 2, -1.0), math.exp(-1)) < 1e-15

    def test_order_zero(self):
        assert mittag_leffler_deriv(0.5, 0, -1.0) == mittag_leffler(0.5, -1.0)

    def test_reference(self):
        assert rel(mittag_leffler_deriv(0.6, 3, -2.0), E06_D3_M2) < 1e-10

    def test_richardson_oracle(self):
        # third derivative via Richardson-extrapolated central differences
        def d3(h):
            f = lambda x: mittag_leffler(0.6, x)
            return (f(-2 + 2 * h) - 2 * f(-2 + h) + 2 * f(-2 - h) - f(-2 - 2 * h)) / (2 * h**3)

        h = 0.02
        est = (4 * d3(h / 2) - d3(h)) / 3
        assert rel(mittag_leffler_deriv(0.6, 3, -2.0), est) < 1e-5

    @pytest.mark.parametrize("nu", [0.3, 0.6, 0.9])
    def test_first_derivative_fd(self, nu):
        for z in np.linspace(-10, -0.05, 12):
            h = 1e-5 * max(1.0, abs(z))
            fd = (mittag_leffler(nu, z + h) - mittag_leffler(nu, z - h)) / (2 * h)
            assert rel(mittag_leffler_deriv(nu, 1, z), fd) < 1e-6

    def test_at_zero(self):
        assert rel(mittag_leffler_deriv(0.4, 2, 0.0), 2 / math.gamma(1.8)) < 1e-14

    def test_large_argument(self):
        # pmf-type use far in the tail: E^(n)(-x) ~ n! x^-(n+1) / Gamma(1 - nu)
        nu, n, x = 0.5, 2, 2000.0
        v = mittag_leffler_deriv(nu, n, -x)
        assert rel(v, 2 / (x**3 * math.gamma(0.5))) < 5e-3

    def test_rejects_positive(self):
        with pytest.raises(ValueError):
            mittag_leffler_deriv(0.5, 1, 0.5)
        with pytest.raises(ValueError):
            mittag_leffler_deriv(0.5, -1, -0.5)


class TestErfcZeta:
    def test_values(self):
        assert erfc(0.0) == 1.0
        assert erfc(np.inf) == 0.0
        assert rel(erfc(1.0), ERFC1) < 1e-15

    def test_quadrature_oracle(self):
        q, _ = integrate.quad(lambda u: math.exp(-u * u), 1, np.inf, epsabs=0, epsrel=1e-13)
        assert rel(erfc(1.0), 2 / math.sqrt(math.pi) * q) < 1e-12

    def test_zeta(self):
        assert rel(zeta(2), math.pi**2 / 6) < 1e-15
        assert rel(zeta(4), math.pi**4 / 90) < 1e-15
        assert rel(ZETA3, 1.2020569031595942854) < 1e-15
        with pytest.raises(ValueError):
            zeta(1)


class TestLogGammaCoeffs:
    def test_exponential_case(self):
        assert np.all(log_gamma_series_coeffs(1.0, 6) == 0)

    def test_second(self):
        c = log_gamma_series_coeffs(0.5, 4)
        assert rel(c[2], math.pi**2 / 4) < 1e-15
        assert rel(c[1], EULER_GAMMA) < 1e-15

    def test_fifth(self):
        c = log_gamma_series_coeffs(0.3, 5)
        assert rel(c[5], zeta(5) / 5 * (0.3**-5 - 1)) < 1e-15

    def test_taylor_oracle(self):
        # numeric Taylor coefficients of ln Gamma(1 - s/nu) - ln Gamma(1 - s) by FFT on a circle
        from scipy.special import loggamma

        nu, m, r = 0.3, 64, 0.1
        s = r * np.exp(2j * np.pi * np.arange(m) / m)
        f = loggamma(1 - s / nu) - loggamma(1 - s)
        coef = (np.fft.fft(f) / m).real / r ** np.arange(m)
        c = log_gamma_series_coeffs(nu, 6)
        for k in range(1, 7):
            assert rel(c[k], coef[k]) < 1e-9


class TestEvalControl:
    def test_validation(self):
        with pytest.raises(ValueError):
            EvalControl(rel_tol=0.0)
        with pytest.raises(ValueError):
            EvalControl(max_terms=3)

    def test_looser_tolerance_still_close(self):
        v = mittag_leffler(0.7, -3.0, EvalControl(rel_tol=1e-6))
        assert rel(v, E07_M3) < 1e-6

    def test_term_cap_reported(self):
        # a tiny term cap cannot reach the tolerance at z = 40; the integral route covers it
        # or an AccuracyError is raised, but never a silently wrong value
        try:
            v = mittag_leffler(0.9, 40.0, EvalControl(max_terms=16))
        except AccuracyError:
            return
        assert rel(v, mittag_leffler(0.9, 40.0)) < 1e-9
