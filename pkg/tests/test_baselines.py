import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from nwwfit import (
    DomainError,
    Interval,
    InvalidParameterError,
    NormalBaseline,
    SingularPointError,
    WeibullBaseline,
    normal_cdf_pdf,
    normal_log_pdf,
    weibull_cdf,
    weibull_param_derivs,
)


class TestWeibullCdf:
    def test_exponential_special_case(self):
        npt.assert_allclose(weibull_cdf(2.0, 1.0, 2.0), 1 - math.exp(-1), rtol=1e-12)

    def test_support_lower_endpoint(self):
        assert weibull_cdf(0.0, 1.3, 2.0) == 0.0
        assert weibull_cdf(-1.0, 1.3, 2.0) == 0.0

    def test_x_equal_scale_forces_unit_exponent(self):
        npt.assert_allclose(weibull_cdf(1.8, 1.5, 1.8), 1 - math.exp(-1), rtol=1e-12)

    @pytest.mark.parametrize("k,lam", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0),
                                       (math.nan, 1.0), (1.0, math.inf)])
    def test_invalid_parameters(self, k, lam):
        with pytest.raises(InvalidParameterError):
            weibull_cdf(1.0, k, lam)


class TestWeibullParamDerivs:
    def test_dg_dlam_closed_form(self):
        # d/dlam of 1-exp(-(x/lam)^k) at k=1: -(x/lam^2) e^(-x/lam)
        t = weibull_param_derivs(2.0, 1.0, 2.0)
        npt.assert_allclose(t.d_cdf[1], -0.5 * math.exp(-1), rtol=1e-12)

    def test_dg_dk_vanishes_at_x_equal_lam(self):
        for k, lam in [(0.7, 1.1), (1.5, 2.0), (4.0, 0.3)]:
            t = weibull_param_derivs(lam, k, lam)
            assert t.d_cdf[0] == pytest.approx(0.0, abs=1e-15)

    def test_first_order_matches_central_differences(self, rng):
        for _ in range(100):
            k = rng.uniform(0.5, 5.0)
            lam = rng.uniform(0.5, 5.0)
            x = lam * rng.uniform(0.2, 2.5)
            t = weibull_param_derivs(x, k, lam)
            for i, (dk, dl) in enumerate([(1e-6 * k, 0.0), (0.0, 1e-6 * lam)]):
                up = WeibullBaseline(k + dk, lam + dl)
                dn = WeibullBaseline(k - dk, lam - dl)
                h = dk + dl
                fd_cdf = (up.cdf(x) - dn.cdf(x)) / (2 * h)
                fd_pdf = (up.pdf(x) - dn.pdf(x)) / (2 * h)
                npt.assert_allclose(t.d_cdf[i], fd_cdf, rtol=1e-5, atol=1e-12)
                npt.assert_allclose(t.d_pdf[i], fd_pdf, rtol=1e-5, atol=1e-12)

    def test_second_order_matches_central_differences(self, rng):
        # cross partial d2G/dk dlam via second-order central differences
        k, lam, x = 1.3, 2.0, 1.5
        t = weibull_param_derivs(x, k, lam, order=2)
        hk, hl = 1e-4 * k, 1e-4 * lam

        def G(kk, ll):
            return WeibullBaseline(kk, ll).cdf(x)

        fd = (G(k + hk, lam + hl) - G(k + hk, lam - hl)
              - G(k - hk, lam + hl) + G(k - hk, lam - hl)) / (4 * hk * hl)
        npt.assert_allclose(t.d2_cdf[0, 1], fd, rtol=1e-4)
        assert t.d2_cdf[0, 1] == t.d2_cdf[1, 0]

    def test_second_order_random_points(self, rng):
        for _ in range(100):
            k = rng.uniform(0.6, 4.0)
            lam = rng.uniform(0.5, 4.0)
            x = lam * rng.uniform(0.3, 2.0)
            t = weibull_param_derivs(x, k, lam, order=2)
            b = WeibullBaseline(k, lam)
            for (i, j) in [(0, 0), (0, 1), (1, 1)]:
                hi = 1e-4 * (k if i == 0 else lam)
                hj = 1e-4 * (k if j == 0 else lam)

                def at(di, dj, fn):
                    kk = k + (di if i == 0 else 0) + (dj if j == 0 else 0)
                    ll = lam + (di if i == 1 else 0) + (dj if j == 1 else 0)
                    return getattr(WeibullBaseline(kk, ll), fn)(x)

                for fn, table in [("cdf", t.d2_cdf), ("pdf", t.d2_pdf)]:
                    fd = (at(hi, hj, fn) - at(hi, -hj, fn)
                          - at(-hi, hj, fn) + at(-hi, -hj, fn)) / (4 * hi * hj)
                    denom = max(abs(fd), 1e-6)
                    assert abs(table[i, j] - fd) / denom < 1e-4

    def test_pole_at_zero(self):
        with pytest.raises(SingularPointError):
            weibull_param_derivs(0.0, 0.8, 1.0)

    def test_bad_order(self):
        with pytest.raises(DomainError):
            weibull_param_derivs(1.0, 1.0, 1.0, order=3)


class TestNormal:
    def test_standard_normal_at_origin(self):
        c, d = normal_cdf_pdf(0.0, 0.0, 1.0)
        assert c == 0.5
        npt.assert_allclose(d, 0.3989422804014327, rtol=1e-15)

    def test_high_precision_tail_value(self):
        # reference value from the complementary error function at 1/sqrt(2)
        import mpmath

        expected = float(mpmath.ncdf(-1))
        c, _ = normal_cdf_pdf(-1.0, 0.0, 1.0)
        assert abs(c - expected) <= 1e-15
        npt.assert_allclose(c, 0.1586553, rtol=1e-6)

    def test_symmetry_at_mean(self):
        for mu, sigma in [(0.0, 1.0), (-3.2, 0.4), (11.0, 7.5)]:
            c, _ = normal_cdf_pdf(mu, mu, sigma)
            assert c == 0.5

    def test_invalid_sigma(self):
        with pytest.raises(InvalidParameterError):
            normal_cdf_pdf(0.0, 0.0, -1.0)
        with pytest.raises(InvalidParameterError):
            normal_cdf_pdf(0.0, 0.0, 0.0)

    def test_log_pdf_far_tail(self):
        lp = normal_log_pdf(40.0, 0.0, 1.0)
        npt.assert_allclose(lp, -0.5 * 1600 - 0.5 * math.log(2 * math.pi), rtol=1e-14)

    def test_derivatives_match_differences(self, rng):
        for _ in range(100):
            mu = rng.uniform(-2, 2)
            sigma = rng.uniform(0.3, 3.0)
            x = mu + sigma * rng.uniform(-2.5, 2.5)
            b = NormalBaseline(mu, sigma)
            gc, gl = b.grad_cdf(x), b.grad_pdf(x)
            hc, hl = b.hess_cdf(x), b.hess_pdf(x)
            for i, h in enumerate([1e-6 * max(1, abs(mu)), 1e-6 * sigma]):
                d = np.zeros(2)
                d[i] = h
                up = NormalBaseline(mu + d[0], sigma + d[1])
                dn = NormalBaseline(mu - d[0], sigma - d[1])
                npt.assert_allclose(gc[i], (up.cdf(x) - dn.cdf(x)) / (2 * h),
                                    rtol=1e-5, atol=1e-12)
                npt.assert_allclose(gl[i], (up.pdf(x) - dn.pdf(x)) / (2 * h),
                                    rtol=1e-5, atol=1e-12)


class TestQuantileRoundTrip:
    def test_weibull_thousand_points(self, rng):
        p = rng.uniform(1e-6, 1 - 1e-6, size=1000)
        for _ in range(5):
            k = rng.uniform(0.4, 6.0)
            lam = rng.uniform(0.2, 8.0)
            b = WeibullBaseline(k, lam)
            npt.assert_allclose(b.cdf(b.quantile(p)), p, atol=1e-8, rtol=0)

    def test_normal_thousand_points(self, rng):
        p = rng.uniform(1e-6, 1 - 1e-6, size=1000)
        b = NormalBaseline(1.4, 2.2)
        npt.assert_allclose(b.cdf(b.quantile(p)), p, atol=1e-8, rtol=0)

    @given(p=st.floats(min_value=1e-9, max_value=1 - 1e-9))
    @settings(max_examples=60, deadline=None)
    def test_weibull_single(self, p):
        b = WeibullBaseline(1.7, 2.4)
        assert abs(b.cdf(b.quantile(p)) - p) <= 1e-8

    def test_quantile_domain(self):
        b = WeibullBaseline(1.0, 1.0)
        for p in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(DomainError):
                b.quantile(p)


class TestNormalizationUnderPerturbation:
    def test_pdf_gradient_integrates_to_zero(self):
        # normalization is parameter-independent: integral of dg/dtheta is 0
        b = WeibullBaseline(1.6, 2.1)
        hi = b.quantile(1 - 1e-14)
        for i in range(2):
            val, _ = quad(lambda x, i=i: b.grad_pdf(np.array([x]))[i][0], 0, hi,
                          limit=200)
            assert abs(val) < 1e-6

    def test_density_integrates_to_one(self):
        for k, lam in [(0.7, 1.0), (1.3, 2.0), (4.5, 3.2)]:
            b = WeibullBaseline(k, lam)
            val, _ = quad(b.pdf, 1e-12, b.quantile(1 - 1e-14), limit=200)
            npt.assert_allclose(val, 1.0, atol=1e-8)


class TestInterval:
    def test_union_overlapping(self):
        a = Interval(0.0, math.inf)
        b = Interval(-math.inf, math.inf, lo_closed=False)
        u = a.union(b)
        assert u.lo == -math.inf and u.hi == math.inf

    def test_union_disjoint_rejected(self):
        with pytest.raises(DomainError):
            Interval(0.0, 1.0, hi_closed=True).union(Interval(2.0, 3.0))

    def test_contains_interior(self):
        iv = Interval(0.0, math.inf)
        assert iv.contains(0.0) and not iv.contains(0.0, interior=True)
        assert iv.contains(1.0, interior=True)
