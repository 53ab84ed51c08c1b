"""Descriptive statistics behind similarity synthesis.

Quartiles use linear interpolation between order statistics at
``h = (n - 1) * prob``; that convention is continuous, deterministic and
reproduces what most spreadsheet and array tools report by default.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyInput, NonFinite


def _checked(values: Iterable[float]) -> list[float]:
    values = [float(v) for v in values]
    if not values:
        raise EmptyInput("need at least one value")
    if not all(math.isfinite(v) for v in values):
        raise NonFinite("values must be finite")
    return values


def _interpolate(ordered: Sequence[float], prob: float) -> float:
    h = (len(ordered) - 1) * prob
    lo = math.floor(h)
    frac = h - lo
    if frac == 0:
        return ordered[lo]
    a, b = ordered[lo], ordered[lo + 1]
    return min(a + frac * (b - a), b)


def quantile(values: Iterable[float], prob: float) -> float:
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"prob must be in [0, 1], got {prob}")
    return _interpolate(sorted(_checked(values)), prob)


@dataclass(frozen=True)
class StatsProfile:
    count: int
    mean: float
    min: float
    max: float
    q1: float
    q3: float
    iqr: float
    range: float

    @property
    def degenerate(self) -> bool:
        return self.iqr == 0 or self.range == 0

    def check(self) -> list[str]:
        """Return the list of violated invariants (empty when consistent)."""
        problems = []
        if self.count < 0:
            problems.append("count < 0")
        if not self.min <= self.q1 <= self.q3 <= self.max:
            problems.append("expected min <= q1 <= q3 <= max")
        if self.iqr != self.q3 - self.q1:
            problems.append("iqr != q3 - q1")
        if self.range != self.max - self.min:
            problems.append("range != max - min")
        return problems


def numeric_profile(values: Iterable[float]) -> StatsProfile:
    ordered = sorted(_checked(values))
    q1 = _interpolate(ordered, 0.25)
    q3 = _interpolate(ordered, 0.75)
    lo, hi = ordered[0], ordered[-1]
    return StatsProfile(
        count=len(ordered),
        # exact rational mean, correctly rounded once
        mean=float(statistics.mean(ordered)),
        min=lo,
        max=hi,
        q1=q1,
        q3=q3,
        iqr=q3 - q1,
        range=hi - lo,
    )


@dataclass(frozen=True)
class CategoryInventory:
    counts: tuple[tuple[str, int], ...]

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.counts]

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)


def categorical_profile(labels: Iterable[str]) -> CategoryInventory:
    # Counter keeps first-seen order
    return CategoryInventory(tuple(Counter(labels).items()))
