"""Exact rational coefficients: Todd/Bernoulli numbers and multi-index helpers.

All values here are :class:`fractions.Fraction`, which is arbitrary precision and
always normalized (lowest terms, positive denominator).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

Rational = Fraction


@dataclass(frozen=True)
class ToddCoefficients:
    """Coefficients ``b[k]`` of ``s / (1 - exp(-s)) = sum_k b[k] s^k / k!``."""

    b: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.b) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.b[k]

    def __len__(self) -> int:
        return len(self.b)

    def series(self) -> list[Fraction]:
        """Taylor coefficients ``b[k] / k!`` of the Todd function."""
        return [bk / math.factorial(k) for k, bk in enumerate(self.b)]


@lru_cache(maxsize=None)
def _todd_series(K: int) -> tuple[Fraction, ...]:
    # (1 - e^{-s}) / s = sum_k (-1)^k s^k / (k+1)!
    d = [Fraction((-1) ** k, math.factorial(k + 1)) for k in range(K + 1)]
    t = [Fraction(1)]
    for k in range(1, K + 1):
        t.append(-sum(d[j] * t[k - j] for j in range(1, k + 1)))
    return tuple(t)


def todd_coefficients(K: int) -> ToddCoefficients:
    """Return ``b[0..K]`` by exact power-series division of ``s`` by ``1 - e^{-s}``."""
    if K < 0:
        raise ValueError(f"order must be non-negative, got {K}")
    t = _todd_series(K)
    return ToddCoefficients(tuple(tk * math.factorial(k) for k, tk in enumerate(t)))


def b_coeff(k: int) -> Fraction:
    return todd_coefficients(k).b[k]


def bernoulli(p: int) -> Fraction:
    """Positive-convention Bernoulli number: ``B_1 = 1/6, B_2 = 1/30, ...``."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return (-1) ** (p - 1) * b_coeff(2 * p)


@dataclass(frozen=True)
class MultiIndex:
    alpha: tuple[int, ...]

    def __post_init__(self):
        if any(a < 0 for a in self.alpha):
            raise ValueError(f"multi-index entries must be non-negative: {self.alpha}")

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def order(self) -> int:
        return sum(self.alpha)

    @property
    def support(self) -> tuple[int, ...]:
        """``r(alpha)``: 1 where the entry is positive, else 0."""
        return tuple(1 if a > 0 else 0 for a in self.alpha)

    @property
    def nu(self) -> int:
        return sum(self.support)

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.alpha) if a > 0)

    @property
    def reduced(self) -> tuple[int, ...]:
        """``alpha - r(alpha)``."""
        return tuple(a - r for a, r in zip(self.alpha, self.support))

    def factorial(self) -> int:
        return math.prod(math.factorial(a) for a in self.alpha)

    def repeat(self, vectors: Sequence) -> list:
        """The tuple ``u_alpha``: ``vectors[i]`` repeated ``alpha[i]`` times."""
        return [vectors[i] for i, a in enumerate(self.alpha) for _ in range(a)]


def multi_indices(n: int, q: int) -> Iterator[MultiIndex]:
    """All multi-indices of length ``n`` and total order ``q`` (lexicographic)."""
    if n == 0:
        if q == 0:
            yield MultiIndex(())
        return
    for bars in itertools.combinations(range(q + n - 1), n - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(q + n - 1 - prev - 1)
        yield MultiIndex(tuple(parts))


def lambda_alpha(alpha: MultiIndex | Sequence[int]) -> Fraction:
    """``(1/alpha!) * prod_i b[alpha_i]``."""
    if not isinstance(alpha, MultiIndex):
        alpha = MultiIndex(tuple(alpha))
    if not alpha.alpha:
        return Fraction(1)
    b = todd_coefficients(max(alpha.alpha)).b
    out = Fraction(1, alpha.factorial())
    for a in alpha.alpha:
        out *= b[a]
        if out == 0:
            break
    return out
