"""Parametric baseline distributions (Weibull, Normal) with parameter derivatives.

Every baseline exposes cdf/pdf/quantile plus first and second derivatives of
both the cdf and the pdf with respect to its parameters; those tables feed the
analytic score vector and observed information matrix of composed models.

Derivative conventions: ``grad_*`` returns an array of shape ``(p,) + x.shape``
and ``hess_*`` an array of shape ``(p, p) + x.shape`` where ``p`` is the number
of parameters, ordered as in ``params.names``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from .errors import DomainError, InvalidParameterError, SingularPointError
from .params import ParamEntry, ParamVector, POSITIVE_EPS

ArrayLike = Union[float, np.ndarray]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Interval:
    """Support interval with endpoint openness flags."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = False

    def contains(self, x, interior: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if interior:
            return (x > self.lo) & (x < self.hi)
        lo_ok = (x >= self.lo) if self.lo_closed else (x > self.lo)
        hi_ok = (x <= self.hi) if self.hi_closed else (x < self.hi)
        return lo_ok & hi_ok

    def union(self, other: "Interval") -> "Interval":
        """Union of two overlapping or contiguous intervals.

        Disjoint unions (a genuine gap between the intervals) are rejected:
        a cdf flat on a gap breaks quantile inversion, and no shipped model
        needs one.
        """
        a, b = (self, other) if self.lo <= other.lo else (other, self)
        gap = b.lo > a.hi or (b.lo == a.hi and not (a.hi_closed or b.lo_closed))
        if gap:
            raise DomainError(f"disjoint support union: {a} and {b}")
        lo, lo_closed = (a.lo, a.lo_closed)
        if a.lo == b.lo:
            lo_closed = a.lo_closed or b.lo_closed
        if a.hi > b.hi:
            hi, hi_closed = a.hi, a.hi_closed
        elif b.hi > a.hi:
            hi, hi_closed = b.hi, b.hi_closed
        else:
            hi, hi_closed = a.hi, a.hi_closed or b.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)


def _scalar_in(x):
    return np.isscalar(x) or (isinstance(x, np.ndarray) and x.ndim == 0)


def _ret(x_in, value):
    return float(value) if _scalar_in(x_in) else value


class BaselineModel(ABC):
    """Contract every baseline family implements.

    All evaluation methods are pure and vectorized over ``x``; instances are
    immutable after construction and safe for concurrent use.
    """

    params: ParamVector
    support: Interval

    @property
    def n_params(self) -> int:
        return len(self.params)

    @abstractmethod
    def with_values(self, values) -> "BaselineModel":
        """New instance with the same family and updated parameter values."""

    @abstractmethod
    def cdf(self, x: ArrayLike) -> ArrayLike: ...

    @abstractmethod
    def sf(self, x: ArrayLike) -> ArrayLike:
        """Survival function 1 - cdf, computed without cancellation."""

    @abstractmethod
    def log_sf(self, x: ArrayLike) -> ArrayLike: ...

    @abstractmethod
    def pdf(self, x: ArrayLike) -> ArrayLike: ...

    @abstractmethod
    def log_pdf(self, x: ArrayLike) -> ArrayLike: ...

    @abstractmethod
    def quantile(self, p: ArrayLike) -> ArrayLike: ...

    @abstractmethod
    def grad_cdf(self, x: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def grad_log_pdf(self, x: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def hess_cdf(self, x: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def hess_log_pdf(self, x: ArrayLike) -> np.ndarray: ...

    def grad_pdf(self, x: ArrayLike) -> np.ndarray:
        g = np.asarray(self.pdf(x), dtype=float)
        return g * self.grad_log_pdf(x)

    def hess_pdf(self, x: ArrayLike) -> np.ndarray:
        g = np.asarray(self.pdf(x), dtype=float)
        gl = self.grad_log_pdf(x)
        return g * (self.hess_log_pdf(x) + gl[:, None] * gl[None, :])

    def grad_cdf_over_sf(self, x: ArrayLike) -> np.ndarray:
        """grad_cdf / sf, overridden where the ratio cancels analytically.

        The generic fallback fails when sf underflows; families whose survival
        function has a closed log form should override.
        """
        return self.grad_cdf(x) / np.asarray(self.sf(x), dtype=float)

    def hess_cdf_over_sf(self, x: ArrayLike) -> np.ndarray:
        return self.hess_cdf(x) / np.asarray(self.sf(x), dtype=float)


def _check_positive(**kv):
    for name, v in kv.items():
        if not (np.isfinite(v) and v > 0):
            raise InvalidParameterError(f"{name} must be finite and > 0, got {v!r}")


class WeibullBaseline(BaselineModel):
    """Weibull distribution on x >= 0 with shape k and scale lam."""

    def __init__(self, k: float, lam: float):
        _check_positive(k=k, lam=lam)
        self.k = float(k)
        self.lam = float(lam)
        self.params = ParamVector(
            (
                ParamEntry("k", self.k, lower=POSITIVE_EPS),
                ParamEntry("lam", self.lam, lower=POSITIVE_EPS),
            )
        )
        self.support = Interval(0.0, math.inf, lo_closed=True, hi_closed=False)

    def with_values(self, values) -> "WeibullBaseline":
        k, lam = np.asarray(values, dtype=float)
        return WeibullBaseline(k, lam)

    def _t(self, x):
        """(x/lam)**k on x > 0, 0 at x <= 0."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            t = np.where(x > 0, (x / self.lam) ** self.k, 0.0)
        return t

    def cdf(self, x):
        t = self._t(x)
        return _ret(x, -np.expm1(-t))

    def sf(self, x):
        return _ret(x, np.exp(-self._t(x)))

    def log_sf(self, x):
        return _ret(x, -self._t(x))

    def pdf(self, x):
        return _ret(x, np.exp(self.log_pdf(np.asarray(x, dtype=float))))

    def log_pdf(self, x):
        x_in = x
        x = np.asarray(x, dtype=float)
        if self.k < 1 and np.any(x == 0):
            raise SingularPointError(f"Weibull pdf pole at x=0 for k={self.k} < 1")
        t = self._t(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            logratio = np.where(x > 0, np.log(x / self.lam), -math.inf)
            lp = np.where(
                x > 0,
                math.log(self.k / self.lam) + (self.k - 1.0) * logratio - t,
                -math.inf,
            )
        if self.k == 1:
            lp = np.where(x == 0, -math.log(self.lam), lp)
        return _ret(x_in, lp)

    def quantile(self, p):
        p_in = p
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise DomainError("quantile requires 0 < p < 1")
        return _ret(p_in, self.lam * (-np.log1p(-p)) ** (1.0 / self.k))

    def _deriv_parts(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x == math.inf):
            raise DomainError("parameter derivatives require x in [0, inf)")
        if np.any(x == 0) and self.k <= 1:
            raise SingularPointError(
                f"Weibull parameter derivatives diverge at x=0 for k={self.k} <= 1"
            )
        pos = x > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            L = np.where(pos, np.log(x / self.lam), 0.0)
        t = self._t(x)
        return x, pos, t, L

    def grad_cdf(self, x):
        x, pos, t, L = self._deriv_parts(x)
        E = np.exp(-t)
        dk = np.where(pos, E * t * L, 0.0)
        dl = np.where(pos, -E * t * self.k / self.lam, 0.0)
        return np.stack([dk, dl])

    def grad_log_pdf(self, x):
        x, pos, t, L = self._deriv_parts(x)
        dk = np.where(pos, 1.0 / self.k + L * (1.0 - t), 0.0)
        dl = np.where(pos, -(self.k / self.lam) * (1.0 - t), 0.0)
        return np.stack([dk, dl])

    def hess_cdf(self, x):
        x, pos, t, L = self._deriv_parts(x)
        E = np.exp(-t)
        t_k, t_l = t * L, -(self.k / self.lam) * t
        t_kk = t * L * L
        t_kl = -(t / self.lam) * (self.k * L + 1.0)
        t_ll = self.k * (self.k + 1.0) * t / self.lam**2
        h_kk = np.where(pos, E * (t_kk - t_k * t_k), 0.0)
        h_kl = np.where(pos, E * (t_kl - t_k * t_l), 0.0)
        h_ll = np.where(pos, E * (t_ll - t_l * t_l), 0.0)
        return np.stack([np.stack([h_kk, h_kl]), np.stack([h_kl, h_ll])])

    def hess_log_pdf(self, x):
        x, pos, t, L = self._deriv_parts(x)
        h_kk = np.where(pos, -1.0 / self.k**2 - L * L * t, 0.0)
        h_kl = np.where(pos, -(1.0 - t) / self.lam + (self.k / self.lam) * t * L, 0.0)
        h_ll = np.where(
            pos, self.k * (1.0 - t) / self.lam**2 - (self.k / self.lam) ** 2 * t, 0.0
        )
        return np.stack([np.stack([h_kk, h_kl]), np.stack([h_kl, h_ll])])

    def grad_cdf_over_sf(self, x):
        # exp(-t) cancels: d(cdf)/sf = d(t)
        x, pos, t, L = self._deriv_parts(x)
        dk = np.where(pos, t * L, 0.0)
        dl = np.where(pos, -t * self.k / self.lam, 0.0)
        return np.stack([dk, dl])

    def hess_cdf_over_sf(self, x):
        x, pos, t, L = self._deriv_parts(x)
        t_k, t_l = t * L, -(self.k / self.lam) * t
        t_kk = t * L * L
        t_kl = -(t / self.lam) * (self.k * L + 1.0)
        t_ll = self.k * (self.k + 1.0) * t / self.lam**2
        h_kk = np.where(pos, t_kk - t_k * t_k, 0.0)
        h_kl = np.where(pos, t_kl - t_k * t_l, 0.0)
        h_ll = np.where(pos, t_ll - t_l * t_l, 0.0)
        return np.stack([np.stack([h_kk, h_kl]), np.stack([h_kl, h_ll])])


class NormalBaseline(BaselineModel):
    """Normal distribution with location mu and scale sigma."""

    def __init__(self, mu: float, sigma: float):
        if not np.isfinite(mu):
            raise InvalidParameterError(f"mu must be finite, got {mu!r}")
        _check_positive(sigma=sigma)
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.params = ParamVector(
            (
                ParamEntry("mu", self.mu),
                ParamEntry("sigma", self.sigma, lower=POSITIVE_EPS),
            )
        )
        self.support = Interval(-math.inf, math.inf, lo_closed=False, hi_closed=False)

    def with_values(self, values) -> "NormalBaseline":
        mu, sigma = np.asarray(values, dtype=float)
        return NormalBaseline(mu, sigma)

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma

    def cdf(self, x):
        return _ret(x, ndtr(self._z(x)))

    def sf(self, x):
        return _ret(x, ndtr(-self._z(x)))

    def log_sf(self, x):
        return _ret(x, log_ndtr(-self._z(x)))

    def pdf(self, x):
        z = self._z(x)
        return _ret(x, np.exp(-0.5 * z * z - _LOG_SQRT_2PI) / self.sigma)

    def log_pdf(self, x):
        z = self._z(x)
        return _ret(x, -0.5 * z * z - _LOG_SQRT_2PI - math.log(self.sigma))

    def quantile(self, p):
        p_in = p
        p = np.asarray(p, dtype=float)
        if np.any((p <= 0) | (p >= 1)):
            raise DomainError("quantile requires 0 < p < 1")
        return _ret(p_in, self.mu + self.sigma * ndtri(p))

    def grad_cdf(self, x):
        z = self._z(x)
        phi = np.exp(-0.5 * z * z - _LOG_SQRT_2PI)
        return np.stack([-phi / self.sigma, -z * phi / self.sigma])

    def grad_log_pdf(self, x):
        z = self._z(x)
        return np.stack([z / self.sigma, (z * z - 1.0) / self.sigma])

    def hess_cdf(self, x):
        z = self._z(x)
        phi = np.exp(-0.5 * z * z - _LOG_SQRT_2PI)
        s2 = self.sigma**2
        h_mm = -z * phi / s2
        h_ms = phi * (1.0 - z * z) / s2
        h_ss = z * phi * (2.0 - z * z) / s2
        return np.stack([np.stack([h_mm, h_ms]), np.stack([h_ms, h_ss])])

    def hess_log_pdf(self, x):
        z = self._z(x)
        s2 = self.sigma**2
        h_mm = np.full_like(z, -1.0 / s2)
        h_ms = -2.0 * z / s2
        h_ss = (1.0 - 3.0 * z * z) / s2
        return np.stack([np.stack([h_mm, h_ms]), np.stack([h_ms, h_ss])])

    def _hazard(self, x):
        """phi(z) / Phi(-z) without underflow (log-domain Mills ratio)."""
        z = self._z(x)
        return np.exp(-0.5 * z * z - _LOG_SQRT_2PI - log_ndtr(-z))

    def grad_cdf_over_sf(self, x):
        z = self._z(x)
        h = self._hazard(x)
        return np.stack([-h / self.sigma, -z * h / self.sigma])

    def hess_cdf_over_sf(self, x):
        z = self._z(x)
        h = self._hazard(x)
        s2 = self.sigma**2
        return np.stack(
            [
                np.stack([-z * h / s2, h * (1.0 - z * z) / s2]),
                np.stack([h * (1.0 - z * z) / s2, z * h * (2.0 - z * z) / s2]),
            ]
        )


@dataclass(frozen=True)
class DerivTable:
    """First (and optionally second) parameter derivatives of a cdf/pdf pair."""

    param_names: tuple[str, ...]
    d_cdf: np.ndarray
    d_pdf: np.ndarray
    d2_cdf: np.ndarray | None = None
    d2_pdf: np.ndarray | None = None


def weibull_cdf(x: ArrayLike, k: float, lam: float) -> ArrayLike:
    """Weibull cdf 1 - exp(-(x/lam)**k); 0 for x <= 0."""
    return WeibullBaseline(k, lam).cdf(x)


def weibull_param_derivs(x: ArrayLike, k: float, lam: float, order: int = 1) -> DerivTable:
    """Derivatives of the Weibull cdf and pdf with respect to (k, lam).

    ``order=1`` fills the first-derivative tables, ``order=2`` additionally the
    second-derivative tables. Requires x in the support interior (x = 0 is a
    singular point of the pdf derivatives when k <= 1).
    """
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order!r}")
    b = WeibullBaseline(k, lam)
    table = DerivTable(
        param_names=b.params.names,
        d_cdf=b.grad_cdf(x),
        d_pdf=b.grad_pdf(x),
    )
    if order == 2:
        table = DerivTable(
            param_names=table.param_names,
            d_cdf=table.d_cdf,
            d_pdf=table.d_pdf,
            d2_cdf=b.hess_cdf(x),
            d2_pdf=b.hess_pdf(x),
        )
    bad = [a for a in (table.d_cdf, table.d_pdf, table.d2_cdf, table.d2_pdf)
           if a is not None and not np.all(np.isfinite(a))]
    if bad:
        raise SingularPointError("non-finite Weibull parameter derivative")
    return table


def normal_cdf_pdf(x: ArrayLike, mu: float, sigma: float):
    """Normal cdf and pdf evaluated together (erf-based, abs error <= 1e-15)."""
    b = NormalBaseline(mu, sigma)
    return b.cdf(x), b.pdf(x)


def normal_log_pdf(x: ArrayLike, mu: float, sigma: float) -> ArrayLike:
    """log of the normal density, safe far into the tails."""
    return NormalBaseline(mu, sigma).log_pdf(x)
