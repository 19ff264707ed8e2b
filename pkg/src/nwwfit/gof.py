"""Information criteria and small-sample-adjusted EDF goodness-of-fit statistics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_PROB_CLAMP = 1e-12


def information_criteria(loglik: float, n_params: int, n: int):
    """(AIC, CAIC, BIC, HQIC) for a fitted model.

    AIC = 2k - 2l; BIC = k ln n - 2l; CAIC = k (ln n + 1) - 2l;
    HQIC = 2k ln(ln n) - 2l.
    """
    if n_params < 0:
        raise DomainError(f"n_params must be >= 0, got {n_params}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n <= 1 and n_params >= 1:
        raise DomainError(f"HQIC undefined for n={n} (ln ln n)")
    neg2l = -2.0 * loglik
    k = float(n_params)
    aic = 2.0 * k + neg2l
    bic = k * math.log(n) + neg2l
    caic = k * (math.log(n) + 1.0) + neg2l
    hqic = neg2l if k == 0 else 2.0 * k * math.log(math.log(n)) + neg2l
    return aic, caic, bic, hqic


def ad_cvm_statistics(sorted_probs, n: int | None = None):
    """Modified Anderson-Darling (A*) and Cramer-von Mises (W*) statistics.

    Input is the fitted cdf evaluated at the order statistics, u_i = F(x_(i)),
    sorted ascending. The quadratic statistics

        W^2 = sum (u_i - (2i-1)/(2n))^2 + 1/(12 n)
        A^2 = -n - (1/n) sum (2i-1) [ln u_i + ln(1 - u_{n+1-i})]

    receive the small-sample multipliers W* = W^2 (1 + 0.5/n) and
    A* = A^2 (1 + 0.75/n + 2.25/n^2). Values of u at exactly 0 or 1 are
    clamped away from the log singularity with a warning.
    """
    u = np.asarray(sorted_probs, dtype=float).ravel()
    if n is None:
        n = u.size
    if u.size != n or n < 1:
        raise DomainError(f"expected {n} sorted probabilities, got {u.size}")
    if np.any(np.diff(u) < 0):
        raise DomainError("probabilities must be sorted ascending")
    if np.any((u < 0) | (u > 1)):
        raise DomainError("probabilities must lie in [0, 1]")
    if np.any((u <= 0) | (u >= 1)):
        warnings.warn(
            "cdf values at 0 or 1 clamped to avoid the log singularity",
            UserWarning,
            stacklevel=2,
        )
        u = np.clip(u, _PROB_CLAMP, 1.0 - _PROB_CLAMP)

    i = np.arange(1, n + 1)
    w2 = float(np.sum((u - (2 * i - 1) / (2 * n)) ** 2) + 1.0 / (12 * n))
    a2 = float(-n - np.sum((2 * i - 1) * (np.log(u) + np.log1p(-u[::-1]))) / n)
    w_star = w2 * (1.0 + 0.5 / n)
    a_star = a2 * (1.0 + 0.75 / n + 2.25 / n**2)
    return a_star, w_star


@dataclass
class GofReport:
    """One comparison row: a fitted model with all its fit measures."""

    model_name: str
    n: int
    n_params: int
    loglik: float
    aic: float
    caic: float
    bic: float
    hqic: float
    a_star: float
    w_star: float
    error: str | None = None
    fit: object | None = None

    @classmethod
    def from_fit(cls, model_name, n, n_params, loglik, sorted_probs, fit=None):
        aic, caic, bic, hqic = information_criteria(loglik, n_params, n)
        a_star, w_star = ad_cvm_statistics(sorted_probs, n)
        return cls(
            model_name=model_name,
            n=n,
            n_params=n_params,
            loglik=loglik,
            aic=aic,
            caic=caic,
            bic=bic,
            hqic=hqic,
            a_star=a_star,
            w_star=w_star,
            fit=fit,
        )

    @classmethod
    def failed(cls, model_name, n, message):
        nan = math.nan
        return cls(model_name, n, 0, nan, nan, nan, nan, nan, nan, nan, error=message)
