"""Truncated multivariate Taylor arithmetic, vectorized over evaluation points.

A :class:`Jet` holds the Taylor coefficients of ``t -> f(x + sum_j t_j w_j)``
in ``k`` variables ``t_1..t_k``, truncated to the box ``t^beta`` with
``beta <= box`` componentwise.  Box truncation is closed under products, so
the coefficient of ``t^box`` is exact and equals
``D^q f(x) . (w_1^box_1, ..., w_k^box_k) / box!``.

Coefficient arrays have shape ``(box_1+1, ..., box_k+1) + batch``.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


class DomainError(ArithmeticError):
    """A function was evaluated outside its domain (log of x <= 0, ...)."""


class Jet:
    __slots__ = ("c", "box")

    def __init__(self, c: np.ndarray, box: tuple[int, ...]):
        self.c = np.asarray(c, dtype=float)
        self.box = box

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, value, box: tuple[int, ...], batch: tuple[int, ...]) -> "Jet":
        c = np.zeros(tuple(b + 1 for b in box) + batch)
        c[(0,) * len(box)] = value
        return cls(c, box)

    @classmethod
    def variable(cls, x0: np.ndarray, slopes: Sequence, box: tuple[int, ...]) -> "Jet":
        """``x0 + sum_j slopes[j] * t_j``."""
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros(tuple(b + 1 for b in box) + x0.shape)
        c[(0,) * len(box)] = x0
        for j, s in enumerate(slopes):
            if box[j] >= 1:
                idx = tuple(int(i == j) for i in range(len(box)))
                c[idx] = s
        return cls(c, box)

    @property
    def k(self) -> int:
        return len(self.box)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b + 1 for b in self.box)

    @property
    def batch(self) -> tuple[int, ...]:
        return self.c.shape[self.k:]

    @property
    def value(self) -> np.ndarray:
        return self.c[(0,) * self.k]

    @property
    def degree(self) -> int:
        return sum(self.box)

    def coefficient(self, beta: Sequence[int] | None = None) -> np.ndarray:
        return self.c[tuple(self.box if beta is None else beta)]

    def derivative(self) -> np.ndarray:
        """``D^q f . (w_1^box_1, ...)`` = top coefficient times ``box!``."""
        return self.coefficient() * math.prod(math.factorial(b) for b in self.box)

    def where(self, mask: np.ndarray, other: "Jet") -> "Jet":
        return Jet(np.where(mask, self.c, other.c), self.box)

    # arithmetic -------------------------------------------------------------

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.box, self.batch)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c, self.box)
        out = self.c.copy()
        out[(0,) * self.k] += other
        return Jet(out, self.box)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.box)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other, self.box)
        return Jet(_convolve(self.c, other.c, self.shape), self.box)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other, self.box)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("jets support integer powers only")
        n = int(n)
        if n == 0:
            return Jet.constant(1.0, self.box, self.batch)
        if n < 0:
            return (self ** (-n)).reciprocal()
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # elementary functions ---------------------------------------------------

    def compose(self, taylor: Callable[[np.ndarray, int], list[np.ndarray]]) -> "Jet":
        """``g(self)`` given ``taylor(a0, K) = [g^(m)(a0)/m! for m = 0..K]``."""
        a0 = self.value
        K = self.degree
        coeffs = taylor(a0, K)
        if K == 0:
            return Jet(np.asarray(coeffs[0], dtype=float).reshape(self.c.shape), self.box)
        delta = self.c.copy()
        delta[(0,) * self.k] = 0.0
        out = np.zeros_like(self.c)
        out[(0,) * self.k] = coeffs[0]
        power = delta
        for m in range(1, K + 1):
            if m > 1:
                power = _convolve(power, delta, self.shape)
            out = out + coeffs[m] * power
        return Jet(out, self.box)

    def exp(self):
        def taylor(a0, K):
            e = np.exp(a0)
            return [e / math.factorial(m) for m in range(K + 1)]

        return self.compose(taylor)

    def log(self):
        a0 = self.value
        if np.any(~(a0 > 0)):
            raise DomainError("log of a non-positive value")

        def taylor(a0, K):
            return [np.log(a0)] + [(-1.0) ** (m + 1) / (m * a0 ** m) for m in range(1, K + 1)]

        return self.compose(taylor)

    def reciprocal(self):
        a0 = self.value
        if np.any(a0 == 0):
            raise DomainError("division by zero")

        def taylor(a0, K):
            inv = 1.0 / a0
            return [(-1.0) ** m * inv ** (m + 1) for m in range(K + 1)]

        return self.compose(taylor)

    def sqrt(self):
        a0 = self.value
        K = self.degree
        if np.any(a0 < 0) or (K > 0 and np.any(a0 == 0)):
            raise DomainError("sqrt of a negative value (or derivative of sqrt at 0)")

        def taylor(a0, K):
            r = np.sqrt(a0)
            out = [r]
            binom = 1.0
            for m in range(1, K + 1):
                binom *= (0.5 - (m - 1)) / m
                out.append(binom * r / a0 ** m)
            return out

        return self.compose(taylor)

    def sin(self):
        def taylor(a0, K):
            s, c = np.sin(a0), np.cos(a0)
            cyc = [s, c, -s, -c]
            return [cyc[m % 4] / math.factorial(m) for m in range(K + 1)]

        return self.compose(taylor)

    def cos(self):
        def taylor(a0, K):
            s, c = np.sin(a0), np.cos(a0)
            cyc = [c, -s, -c, s]
            return [cyc[m % 4] / math.factorial(m) for m in range(K + 1)]

        return self.compose(taylor)

    def __repr__(self):
        return f"Jet(box={self.box}, batch={self.batch})"


def _convolve(a: np.ndarray, b: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Box-truncated product of two coefficient arrays."""
    if not shape:
        return a * b
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for idx in np.ndindex(*shape):
        ai = a[idx]
        out_sl = tuple(slice(i, None) for i in idx)
        b_sl = tuple(slice(0, s - i) for i, s in zip(idx, shape))
        out[out_sl] += ai * b[b_sl]
    return out


def _flat_exp(u: Jet, power: int = 1) -> Jet:
    """``exp(-1/u^power)`` for ``u > 0`` and the zero jet elsewhere."""
    pos = u.value > 0
    safe = u + np.where(pos, 0.0, 1.0 - u.value)
    inner = safe ** power
    h = (-inner.reciprocal()).exp()
    return Jet(np.where(pos, h.c, 0.0), u.box)


def smoothstep(u: Jet, profile: str = "exp") -> Jet:
    """C-infinity step: 0 for ``u <= 0``, 1 for ``u >= 1``.

    ``profile='exp'`` uses ``h(u) = exp(-1/u)``, ``'exp2'`` uses ``exp(-1/u^2)``;
    the step is ``h(u) / (h(u) + h(1 - u))``.
    """
    power = {"exp": 1, "exp2": 2}.get(profile)
    if power is None:
        raise ValueError(f"unknown smoothstep profile {profile!r}")
    u0 = u.value
    mid = (u0 > 0) & (u0 < 1)
    if not np.any(mid):
        return Jet.constant(np.where(u0 >= 1, 1.0, 0.0), u.box, u.batch)
    a = _flat_exp(u, power)
    b = _flat_exp(1.0 - u, power)
    denom = a + b
    denom = denom + np.where(mid, 0.0, 1.0)  # keep the division finite off the transition
    s = a / denom
    one = Jet.constant(1.0, u.box, u.batch)
    zero = Jet.constant(0.0, u.box, u.batch)
    return s.where(mid, one.where(u0 >= 1, zero))
