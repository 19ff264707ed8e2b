import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from nwwfit import (
    ComposedModel,
    DomainError,
    NormalBaseline,
    WeibullBaseline,
    compose_cdf,
    compose_pdf,
    compose_quantile,
    distinguishability_check,
    nww,
)


class TestComposeCdf:
    def test_lower_limit(self, nww_ref):
        assert compose_cdf(nww_ref, 0.0) == 0.0
        assert compose_cdf(nww_ref, -3.0) == 0.0

    def test_upper_limit(self, nww_ref):
        assert compose_cdf(nww_ref, 1e12) == 1.0

    def test_closed_form_oracle(self, nww_ref):
        # high-precision oracle for Phi(exp((x/l1)^k1)-1) - Phi(-(x/l2)^k2)
        import mpmath

        mpmath.mp.dps = 30
        x = mpmath.mpf("1.8")
        t1 = (x / 2) ** mpmath.mpf("1.3")
        expected = float(mpmath.ncdf(mpmath.e**t1 - 1) - mpmath.ncdf(-1))
        npt.assert_allclose(compose_cdf(nww_ref, 1.8), expected, rtol=1e-12)
        npt.assert_allclose(compose_cdf(nww_ref, 1.8), 0.7593, atol=5e-5)

    def test_overflow_saturation(self, nww_ref):
        # far right tail: first term saturates to 1, second term to 0
        for x in (50.0, 200.0, 1e6):
            assert compose_cdf(nww_ref, x) == 1.0

    def test_monotone_on_random_pairs(self, nww_ref, rng):
        x = rng.uniform(0.0, 12.0, size=(10_000, 2))
        lo = x.min(axis=1)
        hi = x.max(axis=1)
        assert np.all(compose_cdf(nww_ref, lo) <= compose_cdf(nww_ref, hi))

    def test_term_decomposition_monotonicity(self, nww_ref):
        # first term must be nondecreasing, subtracted second term nonincreasing
        from scipy.special import ndtr

        x = np.linspace(0.0, 10.0, 2000)
        term1 = ndtr(nww_ref._z1(x))
        term2 = ndtr(np.asarray(nww_ref.g2.log_sf(x)))
        assert np.all(np.diff(term1) >= -1e-15)
        assert np.all(np.diff(term2) <= 1e-15)


class TestComposePdf:
    def test_zero_at_origin_for_shapes_above_one(self, nww_ref):
        assert compose_pdf(nww_ref, 0.0) == 0.0

    def test_quadrature_normalization(self, nww_ref):
        val, _ = quad(lambda t: compose_pdf(nww_ref, t), 0, 60, limit=200)
        npt.assert_allclose(val, 1.0, atol=1e-6)

    def test_bimodal_shape_family(self):
        # two interior local maxima located by derivative sign changes
        m = nww(2.0, 2.2, 6.5, 4.1)
        x = np.linspace(0.01, 8.0, 4000)
        d = np.diff(compose_pdf(m, x))
        sign_flips = np.sum((d[:-1] > 0) & (d[1:] <= 0))
        assert sign_flips == 2

    def test_matches_cdf_derivative(self, nww_ref, rng):
        for x in rng.uniform(0.2, 6.0, size=40):
            h = 1e-6 * max(1.0, x)
            fd = (compose_cdf(nww_ref, x + h) - compose_cdf(nww_ref, x - h)) / (2 * h)
            npt.assert_allclose(compose_pdf(nww_ref, x), fd, rtol=1e-5)

    def test_outside_support(self, nww_ref):
        assert compose_pdf(nww_ref, -1.0) == 0.0


class TestComposeQuantile:
    def test_round_trip_thousand_points(self, nww_ref, rng):
        xs = rng.uniform(0.05, 8.0, size=1000)
        ps = compose_cdf(nww_ref, xs)
        back = np.array([compose_quantile(nww_ref, p) for p in ps])
        npt.assert_allclose(back, xs, atol=1e-8)

    def test_median_self_consistency(self, nww_ref):
        med = compose_quantile(nww_ref, 0.5)
        assert abs(compose_cdf(nww_ref, med) - 0.5) <= 1e-10

    def test_small_p_approaches_support_bottom(self, nww_ref):
        assert compose_quantile(nww_ref, 1e-9) < 1e-2

    def test_upper_tail_limit(self, nww_ref):
        q = compose_quantile(nww_ref, 1 - 1e-12)
        assert compose_cdf(nww_ref, q) >= 1 - 1e-9

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 2.0])
    def test_domain_error(self, nww_ref, p):
        with pytest.raises(DomainError):
            compose_quantile(nww_ref, p)

    @given(p=st.floats(min_value=1e-6, max_value=1 - 1e-6))
    @settings(max_examples=40, deadline=None)
    def test_quantile_inverts_cdf(self, p):
        m = nww(1.3, 2.0, 1.5, 1.8)
        assert abs(compose_cdf(m, compose_quantile(m, p)) - p) <= 1e-10


class TestDistinguishability:
    def test_identical_models(self, nww_ref):
        grid = np.arange(0.0, 10.0, 0.01)
        assert distinguishability_check(nww_ref, nww_ref, grid) == 0.0

    def test_nearby_parameters_distinguishable(self, nww_ref):
        grid = np.arange(0.0, 10.0, 0.01)
        other = nww(1.3, 2.0, 1.5, 1.9)
        assert distinguishability_check(nww_ref, other, grid) > 1e-4

    def test_baseline_swap_not_symmetric(self, nww_ref):
        # unlike two-component mixtures, the composition is not label-symmetric
        grid = np.arange(0.0, 10.0, 0.01)
        swapped = nww(1.5, 1.8, 1.3, 2.0)
        assert distinguishability_check(nww_ref, swapped, grid) > 1e-3

    def test_empty_grid(self, nww_ref):
        with pytest.raises(DomainError):
            distinguishability_check(nww_ref, nww_ref, [])


class TestGeneralComposition:
    def test_normal_normal_composition(self):
        m = ComposedModel(NormalBaseline(0.0, 1.0), NormalBaseline(1.0, 2.0))
        assert m.support.lo == -math.inf
        val, _ = quad(m.pdf, m.quantile(1e-12), m.quantile(1 - 1e-12), limit=300)
        npt.assert_allclose(val, 1.0, atol=1e-6)
        x = np.linspace(-6, 8, 500)
        assert np.all(np.diff(m.cdf(x)) >= 0)

    def test_weibull_normal_composition(self):
        m = ComposedModel(WeibullBaseline(1.5, 2.0), NormalBaseline(3.0, 1.0))
        assert m.support.lo == -math.inf and m.support.hi == math.inf
        p = m.cdf(np.array([-2.0, 0.5, 3.0, 10.0]))
        assert np.all(np.diff(p) > 0)

    def test_with_values_round_trip(self, nww_ref):
        m2 = nww_ref.with_values([1.4, 2.1, 1.6, 1.9])
        npt.assert_allclose(m2.param_values, [1.4, 2.1, 1.6, 1.9])
        assert m2.param_names == ("k1", "lam1", "k2", "lam2")
