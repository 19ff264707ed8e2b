"""Maximum likelihood machinery for composed models.

The log-likelihood, its analytic gradient (score) and the observed information
matrix are all evaluated through per-observation term weights

    w1 = term1 / (term1 + term2),    w2 = 1 - w1,

computed in the log domain. Written this way, every derivative formula becomes
a weight times a polynomial in the bounded ratios G/(1-G), dG/(1-G) and
log(1-G), so no intermediate quantity overflows where a term carries weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize
from scipy.special import gamma as gamma_fn

from .composed import ComposedModel, nww
from .errors import DataSupportError, OptimizationError
from .params import ParamEntry, ParamVector

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Term-activity cutoff for the composition ratio G1/(1-G1) and |log(1-G2)|.
# A term whose ratio exceeds this carries weight exp(-1e50) relative to the
# density floor and contributes nothing representable.
_RATIO_CUTOFF = 1e25

#: Box used when fitting the four Weibull/Weibull parameters: generous, but
#: keeps the optimizer away from overflow-prone corners.
NWW_BOUNDS = (1e-3, 1e3)


@dataclass(frozen=True)
class DataSet:
    """A complete sample of positive, finite observations."""

    observations: np.ndarray
    source: str = ""

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float).ravel()
        if obs.size < 1:
            raise DataSupportError("empty data set")
        bad = ~(np.isfinite(obs) & (obs > 0))
        if bad.any():
            idx = int(np.argmax(bad))
            raise DataSupportError(
                f"observation {idx} = {obs[idx]!r} is not a positive finite value",
                index=idx,
            )
        obs = obs.copy()
        obs.setflags(write=False)
        object.__setattr__(self, "observations", obs)

    @property
    def n(self) -> int:
        return self.observations.size


@dataclass
class FitResult:
    """Outcome of a maximum likelihood fit."""

    estimates: ParamVector
    std_errors: np.ndarray | None
    loglik: float
    iterations: int
    converged: bool
    gradient_norm_at_opt: float
    info_matrix: np.ndarray | None
    n_obs: int
    model_name: str = ""
    se_available: bool = True
    message: str = ""
    loglik_trace: np.ndarray | None = None

    @property
    def n_params(self) -> int:
        return len(self.estimates)


def _log_terms(model: ComposedModel, x: np.ndarray):
    """Per-observation log of the two density terms and their log-sum."""
    g1, g2 = model.g1, model.g2
    G1 = np.asarray(g1.cdf(x), dtype=float)
    S1 = np.asarray(g1.sf(x), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z1 = np.where(S1 > 0, G1 / np.where(S1 > 0, S1, 1.0), math.inf)
    log_sf1 = np.asarray(g1.log_sf(x), dtype=float)
    lp1 = np.asarray(g1.log_pdf(x), dtype=float)
    ok1 = (z1 < _RATIO_CUTOFF) & np.isfinite(log_sf1)
    with np.errstate(invalid="ignore", over="ignore"):
        lt1 = np.where(
            ok1,
            -0.5 * np.where(ok1, z1, 0.0) ** 2 - _LOG_SQRT_2PI + lp1 - 2.0 * log_sf1,
            -math.inf,
        )

    v = np.asarray(g2.log_sf(x), dtype=float)
    lp2 = np.asarray(g2.log_pdf(x), dtype=float)
    ok2 = np.isfinite(v) & (np.abs(v) < _RATIO_CUTOFF)
    with np.errstate(invalid="ignore", over="ignore"):
        lt2 = np.where(ok2, -0.5 * np.where(ok2, v, 0.0) ** 2 - _LOG_SQRT_2PI + lp2 - np.where(ok2, v, 0.0), -math.inf)

    return z1, v, lt1, lt2, np.logaddexp(lt1, lt2)


def _check_density(model: ComposedModel, x: np.ndarray, logf: np.ndarray):
    interior = model.support.contains(x, interior=True)
    bad = ~interior | ~np.isfinite(logf) | np.isnan(logf)
    if bad.any():
        idx = int(np.argmax(bad))
        raise DataSupportError(
            f"observation {idx} = {x[idx]!r} lies outside the model support "
            "or at a zero-density point",
            index=idx,
        )


def log_likelihood(model: ComposedModel, data: DataSet) -> float:
    """Sum of composed log densities; raises instead of returning -inf."""
    x = data.observations
    *_, logf = _log_terms(model, x)
    _check_density(model, x, logf)
    return float(np.sum(logf))


def _term_arrays(baseline, x, kind):
    """Score factor A (p, n) and Hessian factor B (p, p, n) for one term.

    ``kind`` selects the composition channel: 1 for the G/(1-G) term, 2 for
    the log(1-G) term. Both reduce to

        A_j  = dlog g_j + c1 * R_j
        B_jk = c1 (R_j dlog g_k + R_k dlog g_j) + (d2log g_jk + dlog g_j dlog g_k)
               + c1 * RR_jk + c2 * R_j R_k

    with R = grad_cdf/sf, RR = hess_cdf/sf and channel coefficients c1, c2.
    """
    lg = baseline.grad_log_pdf(x)
    l2 = baseline.hess_log_pdf(x)
    R = baseline.grad_cdf_over_sf(x)
    RR = baseline.hess_cdf_over_sf(x)
    if kind == 1:
        G = np.asarray(baseline.cdf(x), dtype=float)
        S = np.asarray(baseline.sf(x), dtype=float)
        z = G / S
        c1 = 2.0 - z * (1.0 + z)
        c2 = c1 * c1 + 2.0 - (1.0 + z) - 3.0 * z * (1.0 + z)
    else:
        v = np.asarray(baseline.log_sf(x), dtype=float)
        c1 = 1.0 + v
        c2 = 1.0 + 3.0 * v + v * v
    A = lg + c1 * R
    B = (
        c1 * (R[:, None] * lg[None, :] + lg[:, None] * R[None, :])
        + (l2 + lg[:, None] * lg[None, :])
        + c1 * RR
        + c2 * R[:, None] * R[None, :]
    )
    return A, B


def score(model: ComposedModel, data: DataSet) -> np.ndarray:
    """Analytic gradient of the log-likelihood in the stacked parameters."""
    x = data.observations
    _, _, lt1, lt2, logf = _log_terms(model, x)
    _check_density(model, x, logf)
    w1 = np.exp(lt1 - logf)
    w2 = np.exp(lt2 - logf)
    r, m = model.g1.n_params, model.g2.n_params
    u = np.zeros(r + m)
    m1 = w1 > 0
    if m1.any():
        A1, _ = _term_arrays(model.g1, x[m1], kind=1)
        u[:r] = (w1[m1] * A1).sum(axis=1)
    m2 = w2 > 0
    if m2.any():
        A2, _ = _term_arrays(model.g2, x[m2], kind=2)
        u[r:] = (w2[m2] * A2).sum(axis=1)
    return u


def observed_information(model: ComposedModel, data: DataSet) -> np.ndarray:
    """Negative Hessian of the log-likelihood, assembled symmetric."""
    x = data.observations
    _, _, lt1, lt2, logf = _log_terms(model, x)
    _check_density(model, x, logf)
    w1 = np.exp(lt1 - logf)
    w2 = np.exp(lt2 - logf)
    r, m = model.g1.n_params, model.g2.n_params
    p = r + m
    H = np.zeros((p, p))

    m1 = w1 > 0
    m2 = w2 > 0
    wa1 = np.zeros((r, x.size))
    wa2 = np.zeros((m, x.size))
    if m1.any():
        A1, B1 = _term_arrays(model.g1, x[m1], kind=1)
        wa1[:, m1] = w1[m1] * A1
        H[:r, :r] += (w1[m1] * B1).sum(axis=2)
    if m2.any():
        A2, B2 = _term_arrays(model.g2, x[m2], kind=2)
        wa2[:, m2] = w2[m2] * A2
        H[r:, r:] += (w2[m2] * B2).sum(axis=2)
    # minus outer product of the per-observation score contributions
    wa = np.vstack([wa1, wa2])
    H -= wa @ wa.T
    J = -H
    return 0.5 * (J + J.T)


def projected_gradient(grad_neg, theta, bounds) -> np.ndarray:
    """Component-wise optimality violation of a box-constrained minimum."""
    pg = np.array(grad_neg, dtype=float)
    for i, (lo, hi) in enumerate(bounds):
        if theta[i] <= lo:
            pg[i] = min(pg[i], 0.0)
        elif theta[i] >= hi:
            pg[i] = max(pg[i], 0.0)
    return pg


@dataclass(frozen=True)
class ModelFamily:
    """A parametric composed-model family the fitter can optimize over."""

    name: str
    param_names: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]
    build: Callable

    def param_vector(self, values) -> ParamVector:
        return ParamVector(
            tuple(
                ParamEntry(n, float(v), lower=lo, upper=hi)
                for n, v, (lo, hi) in zip(self.param_names, values, self.bounds)
            )
        )


NWW_FAMILY = ModelFamily(
    name="nww",
    param_names=("k1", "lam1", "k2", "lam2"),
    bounds=(NWW_BOUNDS,) * 4,
    build=lambda v: nww(*v),
)


def weibull_moment_init(x) -> tuple[float, float]:
    """Moment-matched Weibull (k, lam) from mean and variance."""
    x = np.asarray(x, dtype=float)
    mean = x.mean()
    sd = x.std()
    if sd <= 0 or mean <= 0:
        return 1.0, max(mean, 1e-3)
    cv2 = (sd / mean) ** 2

    def gap(k):
        return gamma_fn(1.0 + 2.0 / k) / gamma_fn(1.0 + 1.0 / k) ** 2 - 1.0 - cv2

    lo, hi = 0.05, 50.0
    if gap(lo) < 0 or gap(hi) > 0:
        k = 1.0
    else:
        from scipy.optimize import brentq

        k = brentq(gap, lo, hi, xtol=1e-10)
    lam = mean / gamma_fn(1.0 + 1.0 / k)
    return float(k), float(lam)


def _nww_starts(data: DataSet, starts: int, rng: np.random.Generator) -> np.ndarray:
    """Seed from moment fits of the full sample and of its upper half,
    then log-uniform perturbations within a factor of 3 either way."""
    x = np.sort(data.observations)
    k1, l1 = weibull_moment_init(x)
    upper = x[x.size // 2 :]
    k2, l2 = weibull_moment_init(upper)
    base = np.array([k1, l1, k2, l2])
    lo, hi = NWW_BOUNDS
    base = np.clip(base, lo * 10, hi / 10)
    out = [base]
    for _ in range(max(0, starts - 1)):
        factor = np.exp(rng.uniform(-math.log(3.0), math.log(3.0), size=4))
        out.append(np.clip(base * factor, lo * 10, hi / 10))
    return np.array(out[:max(1, starts)])


def fit_mle(
    data: DataSet,
    family: ModelFamily = NWW_FAMILY,
    starts: int = 6,
    seed: int = 0,
) -> FitResult:
    """Box-constrained quasi-Newton MLE with analytic gradient and multi-start.

    Runs L-BFGS-B (memory depth 10, projected-gradient tolerance 1e-6,
    relative objective tolerance 1e-10, at most 500 iterations) from ``starts``
    initial points and keeps the best local optimum. Standard errors come from
    the inverse observed information at the optimum; if that matrix is not
    positive definite the fit is still returned with ``se_available=False``.
    """
    rng = np.random.default_rng(seed)
    if family.name == "nww":
        inits = _nww_starts(data, starts, rng)
    else:
        raise OptimizationError(f"no initializer registered for family {family.name!r}")

    def objective(theta):
        try:
            model = family.build(theta)
            ll = log_likelihood(model, data)
            g = score(model, data)
        except (DataSupportError, FloatingPointError, OverflowError, ValueError):
            return math.inf, np.zeros(len(theta))
        if not np.isfinite(ll):
            return math.inf, np.zeros(len(theta))
        return -ll, -np.nan_to_num(g, nan=0.0, posinf=0.0, neginf=0.0)

    attempts = []
    for i, x0 in enumerate(inits):
        res = minimize(
            objective,
            x0,
            jac=True,
            method="L-BFGS-B",
            bounds=list(family.bounds),
            options={"maxiter": 500, "maxcor": 10, "ftol": 1e-10, "gtol": 1e-6},
        )
        attempts.append((i, res))

    usable = [(i, r) for i, r in attempts if np.isfinite(r.fun)]
    if not usable:
        raise OptimizationError(
            "no optimizer start reached a finite optimum",
            diagnostics=[(i, r.message) for i, r in attempts],
        )
    best_i, best = min(usable, key=lambda t: (t[1].fun, t[0]))

    theta = np.asarray(best.x, dtype=float)
    nit = int(best.nit)
    success = bool(best.success)

    def pg_norm_at(th):
        g = -score(family.build(th), data)
        return float(np.max(np.abs(projected_gradient(g, th, family.bounds))))

    pg_norm = pg_norm_at(theta)
    if np.isfinite(best.fun) and pg_norm > 1e-4:
        # the objective-change test tripped first; polish on the gradient alone
        polish = minimize(
            objective,
            theta,
            jac=True,
            method="L-BFGS-B",
            bounds=list(family.bounds),
            options={"maxiter": 200, "maxcor": 10, "ftol": 1e-15, "gtol": 1e-6},
        )
        if np.isfinite(polish.fun) and polish.fun <= best.fun:
            theta = np.asarray(polish.x, dtype=float)
            best = polish
            nit += int(polish.nit)
            pg_norm = pg_norm_at(theta)
            success = success or bool(polish.success)

    model = family.build(theta)
    loglik = float(-best.fun)
    converged = success and pg_norm <= 1e-4

    info = observed_information(model, data)
    std_errors = None
    se_available = False
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        pass
    else:
        std_errors = np.sqrt(np.diag(np.linalg.inv(info)))
        se_available = True

    return FitResult(
        estimates=family.param_vector(theta),
        std_errors=std_errors,
        loglik=loglik,
        iterations=nit,
        converged=converged,
        gradient_norm_at_opt=pg_norm,
        info_matrix=info,
        n_obs=data.n,
        model_name=family.name,
        se_available=se_available,
        message=str(best.message),
    )
