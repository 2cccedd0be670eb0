"""Triangular and Gaussian membership functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError


@dataclass(frozen=True)
class Triangular:
    """Triangle with feet at ``a`` and ``b`` and its peak at ``m``.

    ``a == m`` or ``m == b`` gives a shoulder: membership is 1 at the peak
    and falls off on one side only.
    """

    a: float
    m: float
    b: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.m, self.b)):
            raise ModelError(f"non-finite triangle parameters {self}")
        if not (self.a <= self.m <= self.b) or not self.a < self.b:
            raise ModelError(f"triangle needs a <= m <= b and a < b, got {self}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def center(self) -> float:
        return self.m

    def __call__(self, x: float) -> float:
        a, m, b = self.a, self.m, self.b
        if x < a or x > b:
            return 0.0
        if x == m:
            return 1.0
        if x < m:
            return (x - a) / (m - a)
        return (b - x) / (b - m)

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        a, m, b = self.a, self.m, self.b
        out = np.zeros_like(xs)
        if m > a:
            rising = (xs >= a) & (xs < m)
            out[rising] = (xs[rising] - a) / (m - a)
        if b > m:
            falling = (xs > m) & (xs <= b)
            out[falling] = (b - xs[falling]) / (b - m)
        out[xs == m] = 1.0
        return out


@dataclass(frozen=True)
class Gaussian:
    """Bell curve ``exp(-(x - m)^2 / (2 k^2))`` with centre ``m`` and spread ``k``."""

    m: float
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.k)):
            raise ModelError(f"non-finite gaussian parameters {self}")
        if self.k <= 0:
            raise ModelError(f"gaussian spread must be positive, got k={self.k}")

    @property
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def center(self) -> float:
        return self.m

    def __call__(self, x: float) -> float:
        return math.exp(-((x - self.m) ** 2) / (2.0 * self.k**2))

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return np.exp(-((xs - self.m) ** 2) / (2.0 * self.k**2))


MembershipFunction = Triangular | Gaussian


def eval_membership(mf: MembershipFunction, x: float) -> float:
    return mf(x)
