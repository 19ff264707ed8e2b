"""Two-baseline composed distributions and the Weibull/Weibull (NWW) preset.

The composed cdf is ``F(x) = Phi(G1/(1-G1)) - Phi(log(1-G2))`` where G1, G2
are baseline cdfs and Phi is the standard normal cdf. Its density is

    f(x) = phi(G1/(1-G1)) * g1/(1-G1)^2  +  phi(log(1-G2)) * g2/(1-G2)

computed here in the log domain per term and combined with log-sum-exp, so a
term that underflows never poisons the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .baselines import BaselineModel, Interval, WeibullBaseline, _ret
from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Beyond this the squared argument of phi overflows; the term is then exactly
# zero at double precision (phi decays as exp(-z^2/2)).
_Z_CUTOFF = 1e150


@dataclass(frozen=True)
class ComposedModel:
    """Immutable composition of two baselines; all evaluations are pure."""

    g1: BaselineModel
    g2: BaselineModel
    support: Interval = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "support", self.g1.support.union(self.g2.support))

    @property
    def n_params(self) -> int:
        return self.g1.n_params + self.g2.n_params

    @property
    def param_values(self) -> np.ndarray:
        return np.concatenate([self.g1.params.values, self.g2.params.values])

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(f"{n}1" for n in self.g1.params.names) + tuple(
            f"{n}2" for n in self.g2.params.names
        )

    def with_values(self, values) -> "ComposedModel":
        values = np.asarray(values, dtype=float)
        r = self.g1.n_params
        return ComposedModel(
            self.g1.with_values(values[:r]), self.g2.with_values(values[r:])
        )

    # -- evaluation ---------------------------------------------------------

    def _z1(self, x):
        """G1/(1-G1), using the cdf for small x and the survival for large."""
        G1 = np.asarray(self.g1.cdf(x), dtype=float)
        S1 = np.asarray(self.g1.sf(x), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            z1 = np.where(S1 > 0, G1 / np.where(S1 > 0, S1, 1.0), math.inf)
        return z1

    def cdf(self, x: ArrayLike) -> ArrayLike:
        x_in = x
        x = np.asarray(x, dtype=float)
        term1 = ndtr(np.minimum(self._z1(x), _Z_CUTOFF))
        term2 = ndtr(np.asarray(self.g2.log_sf(x), dtype=float))
        out = np.clip(term1 - term2, 0.0, 1.0)
        out = np.where(x < self.support.lo, 0.0, out)
        out = np.where(x >= self.support.hi, 1.0, out)
        return _ret(x_in, out)

    def log_pdf(self, x: ArrayLike) -> ArrayLike:
        x_in = x
        x = np.asarray(x, dtype=float)
        inside = self.support.contains(x)

        z1 = self._z1(x)
        log_sf1 = np.asarray(self.g1.log_sf(x), dtype=float)
        lp1 = np.asarray(self.g1.log_pdf(x), dtype=float)
        small1 = z1 < _Z_CUTOFF
        with np.errstate(invalid="ignore", over="ignore"):
            lt1 = np.where(
                small1 & np.isfinite(log_sf1),
                -0.5 * np.where(small1, z1, 0.0) ** 2 - _LOG_SQRT_2PI + lp1 - 2.0 * log_sf1,
                -math.inf,
            )

        z2 = np.asarray(self.g2.log_sf(x), dtype=float)
        lp2 = np.asarray(self.g2.log_pdf(x), dtype=float)
        with np.errstate(invalid="ignore"):
            lt2 = np.where(
                np.isfinite(z2), -0.5 * z2 * z2 - _LOG_SQRT_2PI + lp2 - z2, -math.inf
            )

        out = np.logaddexp(lt1, lt2)
        out = np.where(inside, out, -math.inf)
        return _ret(x_in, out)

    def pdf(self, x: ArrayLike) -> ArrayLike:
        return _ret(x, np.exp(self.log_pdf(np.asarray(x, dtype=float))))

    def quantile(self, p: float) -> float:
        """Inverse cdf by bracketing and root refinement, |cdf(x) - p| <= 1e-10."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"quantile requires 0 < p < 1, got {p}")
        lo = self.support.lo if math.isfinite(self.support.lo) else None
        hi = self.support.hi if math.isfinite(self.support.hi) else None
        # initial interior guesses from the baselines' own quantiles
        guesses = [self.g1.quantile(p), self.g2.quantile(p)]
        a = lo if lo is not None else min(guesses) - 1.0
        b = hi if hi is not None else max(guesses) + 1.0
        width = max(1.0, abs(b - a))
        while self.cdf(b) < p:
            b += width
            width *= 2.0
            if width > 1e300:
                raise DomainError(f"failed to bracket quantile for p={p}")
        if lo is None:
            width = max(1.0, abs(b - a))
            while self.cdf(a) > p:
                a -= width
                width *= 2.0
        x = brentq(lambda t: self.cdf(t) - p, a, b, xtol=1e-12, rtol=8.9e-16)
        # Newton polish where the density allows it
        for _ in range(2):
            dens = self.pdf(x)
            if not (np.isfinite(dens) and dens > 0):
                break
            step = (self.cdf(x) - p) / dens
            x_new = x - step
            if not (a <= x_new <= b):
                break
            x = x_new
            if abs(step) < 1e-14 * max(1.0, abs(x)):
                break
        return float(x)


def nww(k1: float, lam1: float, k2: float, lam2: float) -> ComposedModel:
    """The Weibull/Weibull instance of the composition, supported on [0, inf).

    Its cdf reduces to ``Phi(exp((x/lam1)**k1) - 1) - Phi(-(x/lam2)**k2)``.
    """
    return ComposedModel(WeibullBaseline(k1, lam1), WeibullBaseline(k2, lam2))


def compose_cdf(model: ComposedModel, x: ArrayLike) -> ArrayLike:
    return model.cdf(x)


def compose_pdf(model: ComposedModel, x: ArrayLike) -> ArrayLike:
    return model.pdf(x)


def compose_quantile(model: ComposedModel, p: float) -> float:
    return model.quantile(p)


def distinguishability_check(
    model_a: ComposedModel, model_b: ComposedModel, grid
) -> float:
    """Max absolute cdf gap over a grid; 0 means the grid cannot tell them apart."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("distinguishability grid must be nonempty")
    return float(np.max(np.abs(model_a.cdf(grid) - model_b.cdf(grid))))
