"""Competitor models: Normal, Weibull, and two-component mixtures fitted by EM."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .baselines import NormalBaseline, WeibullBaseline
from .composed import ComposedModel
from .errors import DomainError, InvalidParameterError, OptimizationError
from .gof import GofReport
from .inference import DataSet, FitResult, fit_mle
from .params import ParamEntry, ParamVector

_MIN_WEIGHT = 1e-4
_MIN_SCALE = 1e-8


def _as_observations(data, require_positive: bool) -> np.ndarray:
    """Accept a DataSet or a plain array; positivity only where the family needs it."""
    if isinstance(data, DataSet):
        return data.observations
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 1 or not np.all(np.isfinite(x)):
        raise DomainError("observations must be a nonempty finite array")
    if require_positive and np.any(x <= 0):
        raise DomainError("this family requires strictly positive observations")
    return x


def fit_normal(data) -> FitResult:
    """Closed-form normal MLE (mean, uncorrected-variance sqrt)."""
    x = _as_observations(data, require_positive=False)
    mu = float(x.mean())
    sigma = float(np.sqrt(np.mean((x - mu) ** 2)))
    if sigma <= 0:
        raise DomainError("degenerate data: zero variance")
    n = x.size
    b = NormalBaseline(mu, sigma)
    loglik = float(np.sum(b.log_pdf(x)))
    # observed information at the MLE: diag(n/sigma^2, 2n/sigma^2)
    info = np.diag([n / sigma**2, 2.0 * n / sigma**2])
    se = np.sqrt(np.diag(np.linalg.inv(info)))
    estimates = ParamVector(
        (ParamEntry("mu", mu), ParamEntry("sigma", sigma, lower=0.0))
    )
    return FitResult(
        estimates=estimates,
        std_errors=se,
        loglik=loglik,
        iterations=0,
        converged=True,
        gradient_norm_at_opt=0.0,
        info_matrix=info,
        n_obs=n,
        model_name="normal",
    )


def _weibull_profile_mle(x, weights=None, tol=1e-10, max_iter=200, k_init=None):
    """Weighted Weibull MLE via Newton iteration on the profile shape equation.

    With weights w_i the stationarity conditions reduce to

        h(k) = sum w x^k ln x / sum w x^k - 1/k - sum w ln x / sum w = 0
        lam^k = sum w x^k / sum w.

    ``k_init`` warm-starts the iteration (one or two Newton steps inside an
    EM loop instead of a cold solve).
    """
    x = np.asarray(x, dtype=float)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    lx = np.log(x)
    mean_lx = float(np.sum(w * lx) / np.sum(w))

    def h_and_deriv(k):
        xk = x**k
        swk = np.sum(w * xk)
        swkl = np.sum(w * xk * lx)
        swkl2 = np.sum(w * xk * lx * lx)
        ratio = swkl / swk
        h = ratio - 1.0 / k - mean_lx
        dh = (swkl2 / swk) - ratio * ratio + 1.0 / k**2
        return h, dh

    if k_init is not None:
        k = float(k_init)
    else:
        # moment-style starting value; variance of ln x relates to 1/k
        sd_lx = float(np.sqrt(np.sum(w * (lx - mean_lx) ** 2) / np.sum(w)))
        k = math.pi / (sd_lx * math.sqrt(6.0)) if sd_lx > 0 else 1.0
    k = min(max(k, 0.05), 100.0)
    for _ in range(max_iter):
        h, dh = h_and_deriv(k)
        step = h / dh
        k_new = k - step
        if not (0.01 <= k_new <= 500.0):
            break
        if abs(k_new - k) <= tol * max(1.0, k):
            k = k_new
            break
        k = k_new
    else:
        pass
    h, _ = h_and_deriv(k)
    if abs(h) > 1e-8:
        # Newton left the basin; fall back to bracketed root finding
        lo, hi = 0.01, 500.0
        h_lo, _ = h_and_deriv(lo)
        h_hi, _ = h_and_deriv(hi)
        if h_lo * h_hi < 0:
            k = brentq(lambda kk: h_and_deriv(kk)[0], lo, hi, xtol=1e-12)
        else:
            raise OptimizationError("Weibull profile equation has no root in range")
    lam = float((np.sum(w * x**k) / np.sum(w)) ** (1.0 / k))
    return float(k), lam


def fit_weibull(data) -> FitResult:
    """Weibull MLE by Newton iteration on the profile shape equation."""
    x = _as_observations(data, require_positive=True)
    if np.all(x == x[0]):
        raise DomainError("degenerate data: zero variance")
    k, lam = _weibull_profile_mle(x)
    b = WeibullBaseline(k, lam)
    loglik = float(np.sum(b.log_pdf(x)))
    info = -b.hess_log_pdf(x).sum(axis=2)
    se = None
    se_ok = False
    try:
        np.linalg.cholesky(info)
        se = np.sqrt(np.diag(np.linalg.inv(info)))
        se_ok = True
    except np.linalg.LinAlgError:
        pass
    estimates = ParamVector(
        (ParamEntry("k", k, lower=0.0), ParamEntry("lam", lam, lower=0.0))
    )
    return FitResult(
        estimates=estimates,
        std_errors=se,
        loglik=loglik,
        iterations=0,
        converged=True,
        gradient_norm_at_opt=0.0,
        info_matrix=info,
        n_obs=x.size,
        model_name="weibull",
        se_available=se_ok,
    )


@dataclass(frozen=True)
class MixtureModel:
    """Two-component mixture with components from one parametric family."""

    component_family: str  # "normal" | "weibull"
    w: float
    params1: tuple[float, float]
    params2: tuple[float, float]

    def __post_init__(self):
        if self.component_family not in ("normal", "weibull"):
            raise InvalidParameterError(
                f"unknown component family {self.component_family!r}"
            )
        if not 0.0 < self.w < 1.0:
            raise InvalidParameterError(f"mixture weight must be in (0, 1), got {self.w}")

    def _components(self):
        cls = NormalBaseline if self.component_family == "normal" else WeibullBaseline
        return cls(*self.params1), cls(*self.params2)

    def log_pdf(self, x):
        c1, c2 = self._components()
        la = np.log(self.w) + np.asarray(c1.log_pdf(x), dtype=float)
        lb = np.log1p(-self.w) + np.asarray(c2.log_pdf(x), dtype=float)
        return np.logaddexp(la, lb)

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def cdf(self, x):
        c1, c2 = self._components()
        return self.w * np.asarray(c1.cdf(x), dtype=float) + (1.0 - self.w) * np.asarray(
            c2.cdf(x), dtype=float
        )

    @property
    def param_values(self):
        return np.array([self.w, *self.params1, *self.params2])


def _mixture_param_vector(family, values) -> ParamVector:
    w, a1, b1, a2, b2 = values
    if family == "normal":
        names = ("w", "mu1", "sigma1", "mu2", "sigma2")
        lowers = (0.0, -math.inf, 0.0, -math.inf, 0.0)
    else:
        names = ("w", "k1", "lam1", "k2", "lam2")
        lowers = (0.0, 0.0, 0.0, 0.0, 0.0)
    uppers = (1.0, math.inf, math.inf, math.inf, math.inf)
    return ParamVector(
        tuple(
            ParamEntry(n, float(v), lower=lo, upper=hi)
            for n, v, lo, hi in zip(names, values, lowers, uppers)
        )
    )


def _kmeans_two(x, rng, perturb=False):
    """Lloyd iterations with two centers on the line; returns a boolean split."""
    lo, hi = np.quantile(x, [0.25, 0.75])
    c = np.array([lo, hi], dtype=float)
    if perturb:
        c = c * np.exp(rng.uniform(-0.5, 0.5, size=2))
        c.sort()
    for _ in range(25):
        assign = np.abs(x[:, None] - c[None, :]).argmin(axis=1)
        if assign.all() or not assign.any():
            # everything in one cluster: split at a random quantile instead
            q = rng.uniform(0.3, 0.7)
            assign = (x > np.quantile(x, q)).astype(int)
        new = np.array([x[assign == 0].mean(), x[assign == 1].mean()])
        if np.allclose(new, c):
            break
        c = new
    return assign == 1


class _ComponentCollapse(Exception):
    pass


def _em_once(x, family, resp, tol, max_iter):
    """Run EM to convergence from an initial responsibility split."""
    trace = []
    prev = -math.inf
    k1_warm = k2_warm = None
    for _ in range(max_iter):
        # M-step
        w = float(resp.mean())
        if not _MIN_WEIGHT < w < 1.0 - _MIN_WEIGHT:
            raise _ComponentCollapse
        if family == "normal":
            def wmle(r):
                sw = r.sum()
                mu = float((r * x).sum() / sw)
                var = float((r * (x - mu) ** 2).sum() / sw)
                return mu, math.sqrt(var)
            p1 = wmle(resp)
            p2 = wmle(1.0 - resp)
            if p1[1] < _MIN_SCALE or p2[1] < _MIN_SCALE:
                raise _ComponentCollapse
        else:
            try:
                p1 = _weibull_profile_mle(x, resp, k_init=k1_warm)
                p2 = _weibull_profile_mle(x, 1.0 - resp, k_init=k2_warm)
            except OptimizationError as exc:
                raise _ComponentCollapse from exc
            if p1[1] < _MIN_SCALE or p2[1] < _MIN_SCALE:
                raise _ComponentCollapse
            k1_warm, k2_warm = p1[0], p2[0]
        mix = MixtureModel(family, w, p1, p2)

        # E-step and convergence check
        cls = NormalBaseline if family == "normal" else WeibullBaseline
        la = math.log(w) + np.asarray(cls(*p1).log_pdf(x), dtype=float)
        lb = math.log1p(-w) + np.asarray(cls(*p2).log_pdf(x), dtype=float)
        logf = np.logaddexp(la, lb)
        ll = float(logf.sum())
        trace.append(ll)
        resp = np.exp(la - logf)
        if ll - prev <= tol and len(trace) > 1:
            break
        prev = ll
    return mix, np.array(trace)


def _canonicalize(mix: MixtureModel) -> MixtureModel:
    """Component 1 is the one with the smaller location/scale parameter.

    Mixture densities are invariant under swapping the component labels
    together with w <-> 1-w; fixing the order resolves that label ambiguity.
    """
    key1 = mix.params1[0] if mix.component_family == "normal" else mix.params1[1]
    key2 = mix.params2[0] if mix.component_family == "normal" else mix.params2[1]
    if key1 <= key2:
        return mix
    return MixtureModel(mix.component_family, 1.0 - mix.w, mix.params2, mix.params1)


def fit_mixture_em(
    data,
    family: str = "normal",
    starts: int = 5,
    seed: int = 0,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> FitResult:
    """Two-component mixture by EM with multi-start and label canonicalization.

    The E-step computes posterior responsibilities; the M-step uses the
    closed-form weighted updates (normal) or a weighted Newton iteration on
    each component's profile shape equation (Weibull). A start whose weight or
    scale collapses is abandoned and restarted from a fresh split.
    """
    if family not in ("normal", "weibull"):
        raise DomainError(f"unknown mixture family {family!r}")
    x = _as_observations(data, require_positive=family == "weibull")
    if x.size < 10:
        raise DomainError(f"mixture fitting needs n >= 10, got {x.size}")

    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(max(1, starts)):
        hard = _kmeans_two(x, rng, perturb=attempt > 0)
        resp = np.where(hard, 0.9, 0.1)
        try:
            mix, trace = _em_once(x, family, resp, tol, max_iter)
        except _ComponentCollapse:
            continue
        if best is None or trace[-1] > best[1][-1]:
            best = (mix, trace)
    if best is None:
        raise OptimizationError("every EM start collapsed a component")

    mix, trace = best
    mix = _canonicalize(mix)
    values = mix.param_values
    loglik = float(trace[-1])

    # standard errors from the numerical Hessian of the mixture log-likelihood
    info, se, se_ok = _mixture_observed_information(x, family, values)
    grad = _mixture_gradient(x, family, values)
    return FitResult(
        estimates=_mixture_param_vector(family, values),
        std_errors=se,
        loglik=loglik,
        iterations=len(trace),
        converged=True,
        gradient_norm_at_opt=float(np.max(np.abs(grad))),
        info_matrix=info,
        n_obs=x.size,
        model_name="nn" if family == "normal" else "ww",
        se_available=se_ok,
        loglik_trace=trace,
    )


def _mixture_loglik(x, family, values):
    mix = MixtureModel(family, values[0], tuple(values[1:3]), tuple(values[3:5]))
    return float(mix.log_pdf(x).sum())


def _mixture_gradient(x, family, values, h=1e-6):
    g = np.zeros(5)
    for i in range(5):
        step = h * max(1.0, abs(values[i]))
        up = values.copy(); up[i] += step
        dn = values.copy(); dn[i] -= step
        g[i] = (_mixture_loglik(x, family, up) - _mixture_loglik(x, family, dn)) / (2 * step)
    return g


def _mixture_observed_information(x, family, values, h=1e-4):
    p = 5
    H = np.zeros((p, p))
    steps = [h * max(1.0, abs(v)) for v in values]
    for i in range(p):
        for j in range(i, p):
            ei = np.zeros(p); ei[i] = steps[i]
            ej = np.zeros(p); ej[j] = steps[j]
            val = (
                _mixture_loglik(x, family, values + ei + ej)
                - _mixture_loglik(x, family, values + ei - ej)
                - _mixture_loglik(x, family, values - ei + ej)
                + _mixture_loglik(x, family, values - ei - ej)
            ) / (4 * steps[i] * steps[j])
            H[i, j] = H[j, i] = val
    info = -H
    try:
        np.linalg.cholesky(info)
        se = np.sqrt(np.diag(np.linalg.inv(info)))
        return info, se, True
    except np.linalg.LinAlgError:
        return info, None, False


_MODEL_N_PARAMS = {"nww": 4, "nn": 5, "ww": 5, "normal": 2, "weibull": 2}


def _fit_and_cdf(name, data, seed, starts):
    if name == "nww":
        fit = fit_mle(data, starts=starts, seed=seed)
        model = ComposedModel(
            WeibullBaseline(fit.estimates["k1"], fit.estimates["lam1"]),
            WeibullBaseline(fit.estimates["k2"], fit.estimates["lam2"]),
        )
        return fit, model.cdf
    if name in ("nn", "ww"):
        family = "normal" if name == "nn" else "weibull"
        fit = fit_mixture_em(data, family=family, seed=seed)
        v = fit.estimates.values
        mix = MixtureModel(family, v[0], tuple(v[1:3]), tuple(v[3:5]))
        return fit, mix.cdf
    if name == "normal":
        fit = fit_normal(data)
        return fit, NormalBaseline(*fit.estimates.values).cdf
    if name == "weibull":
        fit = fit_weibull(data)
        return fit, WeibullBaseline(*fit.estimates.values).cdf
    raise DomainError(f"unknown model {name!r}")


def compare_models(
    data: DataSet,
    models=("nww", "nn", "ww", "normal", "weibull"),
    seed: int = 0,
    starts: int = 4,
):
    """Fit each requested model and rank the reports by AIC.

    A model that fails to fit contributes an error row at the end of the
    ranking instead of aborting the comparison.
    """
    reports = []
    for name in models:
        try:
            fit, cdf = _fit_and_cdf(name, data, seed, starts)
            probs = np.sort(np.asarray(cdf(np.sort(data.observations)), dtype=float))
            report = GofReport.from_fit(
                name, data.n, _MODEL_N_PARAMS[name], fit.loglik, probs, fit=fit
            )
        except Exception as exc:  # failures are reported in-row
            report = GofReport.failed(name, data.n, f"{type(exc).__name__}: {exc}")
        reports.append(report)
    reports.sort(key=lambda r: (math.isnan(r.aic), r.aic))
    return reports
