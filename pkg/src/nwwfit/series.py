"""Series representation of the composed cdf and series/quadrature moments.

The composed cdf expands as a double power series

    F(x) = sum_{i in {1,2}} sum_{n,k >= 0} c_{i,n,k} * G_i(x)^(k+2n+1)

where the outer index n comes from the entire-function expansion of the normal
cdf and the inner coefficients follow one of two recursions (one per
composition channel). Truncated evaluation is verified against the closed form
on the region G1, G2 <= 0.3; outside it the inner series loses accuracy at any
fixed truncation and evaluation carries a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .composed import ComposedModel
from .errors import ConvergenceUnverifiedWarning, DivergenceError, DomainError

_SQRT_2PI = math.sqrt(2.0 * math.pi)

#: Verified convergence region for truncated series evaluation.
REGION_MAX_CDF = 0.3


@dataclass(frozen=True)
class TruncationSpec:
    """Cutoffs for the outer (n) and inner (k) series."""

    n_max: int = 20
    k_max: int = 200

    def __post_init__(self):
        if self.n_max < 0 or self.k_max < 0:
            raise DomainError("truncation cutoffs must be nonnegative")


@dataclass(frozen=True)
class SeriesCoefficients:
    """Inner-series coefficients c[0..k_max] for one channel and outer index."""

    family: int
    n: int
    values: np.ndarray


def series_coeffs(family: int, n: int, k_max: int, exact: bool = False):
    """Coefficients of the k-th power in the expansion of the channel kernel.

    Channel 1 expands (1/(1-y))^(2n+1); channel 2 expands
    ((-log(1-y))/y)^(2n+1) = (sum_k y^k/(k+1))^(2n+1). Both satisfy
    c[0] = 1 and

        c[k] = (1/k) * sum_{s=1..k} a_s * (2 s (n+1) - k) * c[k-s]

    with a_s = 1 for channel 1 and a_s = 1/(s+1) for channel 2.

    With ``exact=True`` the recursion runs in rational arithmetic and a list of
    ``Fraction`` is returned instead of a float array.
    """
    if family not in (1, 2):
        raise DomainError(f"family must be 1 or 2, got {family!r}")
    if n < 0 or k_max < 0:
        raise DomainError("series indices must be nonnegative")
    if exact:
        c = [Fraction(1)]
        for k in range(1, k_max + 1):
            acc = Fraction(0)
            for s in range(1, k + 1):
                w = Fraction(2 * s * (n + 1) - k)
                if family == 2:
                    w = w / (s + 1)
                acc += w * c[k - s]
            c.append(acc / k)
        return SeriesCoefficients(family, n, np.array(c, dtype=object))
    return SeriesCoefficients(family, n, _coeff_table(family, n, k_max).copy())


@lru_cache(maxsize=256)
def _coeff_table(family: int, n: int, k_max: int) -> np.ndarray:
    c = np.empty(k_max + 1)
    c[0] = 1.0
    for k in range(1, k_max + 1):
        s = np.arange(1, k + 1)
        w = (2 * s * (n + 1) - k).astype(float)
        if family == 2:
            w = w / (s + 1)
        c[k] = math.fsum(w * c[k - s]) / k
    c.setflags(write=False)
    return c


def _outer_weight(n: int) -> float:
    return (-0.5) ** n / (math.factorial(n) * (2 * n + 1) * _SQRT_2PI)


def _warn_region(u1: float, u2: float):
    if u1 > REGION_MAX_CDF or u2 > REGION_MAX_CDF:
        warnings.warn(
            f"series evaluated outside its verified region "
            f"(G1={u1:.3g}, G2={u2:.3g} > {REGION_MAX_CDF}); "
            "the closed form is authoritative there",
            ConvergenceUnverifiedWarning,
            stacklevel=3,
        )


def series_cdf(model: ComposedModel, x: float, trunc: TruncationSpec = TruncationSpec()) -> float:
    """Truncated double-series cdf; compensated summation over all terms."""
    u1 = float(model.g1.cdf(x))
    u2 = float(model.g2.cdf(x))
    _warn_region(u1, u2)
    terms = []
    for n in range(trunc.n_max + 1):
        w_n = _outer_weight(n)
        for fam, u in ((1, u1), (2, u2)):
            if u == 0.0:
                continue
            c = _coeff_table(fam, n, trunc.k_max)
            powers = u ** np.arange(trunc.k_max + 1)
            terms.append(w_n * u ** (2 * n + 1) * math.fsum(c * powers))
    return math.fsum(terms)


@lru_cache(maxsize=64)
def _density_weight_poly(family: int, n_max: int, k_max: int) -> np.ndarray:
    """Polynomial W(u) = sum_{n,k} c_{i,n,k} (k+2n+1) u^(k+2n).

    Integrating Q_i(u)^r W_i(u) du gives the channel-i part of the truncated
    series moment: the truncated double sum is finite, so the interchange of
    sum and integral is exact.
    """
    deg = k_max + 2 * n_max
    buckets = [[] for _ in range(deg + 1)]
    for n in range(n_max + 1):
        w_n = _outer_weight(n)
        c = _coeff_table(family, n, k_max)
        for k in range(k_max + 1):
            p = k + 2 * n + 1
            buckets[k + 2 * n].append(w_n * c[k] * p)
    out = np.array([math.fsum(b) for b in buckets])
    out.setflags(write=False)
    return out


def _channel_moment(model, family, r, u_hi, trunc):
    """Integral of Q_i(u)^r W_i(u) over (0, u_hi)."""
    if u_hi <= 0.0:
        return 0.0
    baseline = model.g1 if family == 1 else model.g2
    coeffs = _density_weight_poly(family, trunc.n_max, trunc.k_max)

    def integrand(u):
        return baseline.quantile(u) ** r * np.polynomial.polynomial.polyval(u, coeffs)

    val, _ = quad(integrand, 0.0, u_hi, limit=200, epsabs=1e-14, epsrel=1e-10)
    return val


def _support_points(model, extra=()):
    lo = model.support.lo
    qs = [model.quantile(p) for p in (0.25, 0.5, 0.75, 1.0 - 1e-6)]
    hi = model.quantile(1.0 - 1e-13)
    pts = sorted(p for p in (*qs, *extra) if lo < p < hi)
    return lo, hi, pts


def raw_moment(model: ComposedModel, r: int, method: str = "quadrature",
               trunc: TruncationSpec = TruncationSpec()) -> float:
    """r-th raw moment by adaptive quadrature or by the truncated series.

    The quadrature path is authoritative. The series path evaluates the
    truncated linear representation literally; over the full support that
    rearrangement is not absolutely convergent, so the result depends on the
    truncation and carries a convergence warning. Inside the verified region
    use :func:`incomplete_moment`, where the same machinery converges.
    """
    if r < 1 or int(r) != r:
        raise DomainError(f"moment order must be a positive integer, got {r!r}")
    if method == "quadrature":
        lo, hi, pts = _support_points(model)
        val, _ = quad(
            lambda t: t**r * model.pdf(t),
            lo,
            hi,
            points=pts,
            limit=400,
            epsabs=1e-12,
            epsrel=1e-10,
        )
        return val
    if method == "series":
        warnings.warn(
            "the full-range series moment is a formal rearrangement without "
            "absolute convergence; its truncated value is not a reliable "
            "estimate (use method='quadrature', or incomplete_moment inside "
            "the verified region)",
            ConvergenceUnverifiedWarning,
            stacklevel=2,
        )
        return _channel_moment(model, 1, r, 1.0, trunc) + _channel_moment(
            model, 2, r, 1.0, trunc
        )
    raise DomainError(f"unknown moment method {method!r}")


def incomplete_moment(model: ComposedModel, r: int, z: float,
                      method: str = "quadrature",
                      trunc: TruncationSpec = TruncationSpec()) -> float:
    """Integral of x^r times the density from the lower support end to z."""
    if r < 1 or int(r) != r:
        raise DomainError(f"moment order must be a positive integer, got {r!r}")
    if z == math.inf:
        return raw_moment(model, r, method=method, trunc=trunc)
    if z <= model.support.lo:
        return 0.0
    if method == "quadrature":
        lo = model.support.lo
        pts = [p for p in (model.quantile(0.25), model.quantile(0.5)) if lo < p < z]
        val, _ = quad(
            lambda t: t**r * model.pdf(t),
            lo,
            z,
            points=pts or None,
            limit=400,
            epsabs=1e-12,
            epsrel=1e-10,
        )
        return val
    if method == "series":
        u1 = float(model.g1.cdf(z))
        u2 = float(model.g2.cdf(z))
        _warn_region(u1, u2)
        return _channel_moment(model, 1, r, u1, trunc) + _channel_moment(
            model, 2, r, u2, trunc
        )
    raise DomainError(f"unknown moment method {method!r}")


def mgf(model: ComposedModel, t: float) -> float:
    """Moment generating function E(exp(tX)) by quadrature with a tail bound.

    For Weibull channels the second density term decays like
    exp(-(x/lam2)^(2 k2) / 2); with every shape below 1 the integral is only
    guaranteed for t <= 0, and positive t raises a divergence error.
    """
    t = float(t)
    if t == 0.0:
        return 1.0
    from .baselines import WeibullBaseline

    shapes = [b.k for b in (model.g1, model.g2) if isinstance(b, WeibullBaseline)]
    if t > 0 and shapes and min(shapes) < 1.0:
        raise DivergenceError(
            f"mgf not guaranteed for t={t} > 0 with a Weibull shape below 1"
        )

    lo, hi, pts = _support_points(model)

    def integrand(x):
        return math.exp(t * x) * float(model.pdf(x))

    if t > 0:
        # extend until the integrand is negligible and provably decaying
        while integrand(hi) > 1e-16 or integrand(hi) > integrand(0.99 * hi + 0.01 * lo):
            hi *= 2.0
            if hi > 1e12:
                raise DivergenceError(f"mgf integrand does not decay for t={t}")
    val, _ = quad(integrand, lo, hi, points=[p for p in pts if p < hi],
                  limit=400, epsabs=1e-12, epsrel=1e-10)
    return val
