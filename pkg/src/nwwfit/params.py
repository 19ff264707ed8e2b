"""Named, bounded parameter vectors shared by all model families."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError

#: Lower bound used for positivity-constrained parameters so box-constrained
#: optimizers never evaluate exactly on the boundary.
POSITIVE_EPS = 1e-8


@dataclass(frozen=True)
class ParamEntry:
    """A single named parameter with open-interval bounds."""

    name: str
    value: float
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise InvalidParameterError(f"{self.name}: non-finite value {self.value!r}")
        if not self.lower < self.value < self.upper:
            raise InvalidParameterError(
                f"{self.name}={self.value} outside open bounds ({self.lower}, {self.upper})"
            )


@dataclass(frozen=True)
class ParamVector:
    """Ordered collection of :class:`ParamEntry` with unique names.

    Values always lie strictly inside their bounds; :meth:`with_values`
    projects candidate values back into the open box before constructing
    the new vector, so optimizer steps cannot produce an illegal state.
    """

    entries: tuple[ParamEntry, ...]

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise InvalidParameterError(f"duplicate parameter names: {names}")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, name: str) -> float:
        for e in self.entries:
            if e.name == name:
                return e.value
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries], dtype=float)

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [(e.lower, e.upper) for e in self.entries]

    def as_dict(self) -> dict[str, float]:
        return {e.name: e.value for e in self.entries}

    def with_values(self, values) -> "ParamVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.entries),):
            raise InvalidParameterError(
                f"expected {len(self.entries)} values, got shape {values.shape}"
            )
        new = []
        for e, v in zip(self.entries, values):
            v = float(v)
            # project strictly inside the open box
            if v <= e.lower:
                v = e.lower + POSITIVE_EPS * max(1.0, abs(e.lower))
            if v >= e.upper:
                v = e.upper - POSITIVE_EPS * max(1.0, abs(e.upper))
            new.append(replace(e, value=v))
        return ParamVector(tuple(new))


def positive_params(**named_values) -> ParamVector:
    """Build a ParamVector of strictly positive parameters (lower bound ``POSITIVE_EPS``)."""
    return ParamVector(
        tuple(
            ParamEntry(name, float(v), lower=POSITIVE_EPS, upper=math.inf)
            for name, v in named_values.items()
        )
    )
