"""Smooth functions with directional derivatives ``D^q f(x) . (w_1, ..., w_q)``.

Every function implements :meth:`SmoothFunction.jet`; evaluation and
derivative contractions are read off the jet.  :class:`Polynomial` also has
exact rational evaluation and derivatives, which the expansion code uses
when the whole computation can stay in rationals.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Sequence

import numpy as np

from .expressions import BinOp, Call, Const, Expression, Neg, Node, Pow, Var, parse_expression
from .jets import DomainError, Jet, smoothstep

MAX_ORDER = 16


class OrderTooLarge(ValueError):
    pass


def _group_dirs(dirs: Sequence) -> tuple[list[np.ndarray], tuple[int, ...]]:
    keys: list[tuple] = []
    vecs: list[np.ndarray] = []
    counts: list[int] = []
    for w in dirs:
        arr = np.asarray([float(c) for c in w])
        key = tuple(arr)
        if key in keys:
            counts[keys.index(key)] += 1
        else:
            keys.append(key)
            vecs.append(arr)
            counts.append(1)
    return vecs, tuple(counts)


class SmoothFunction(ABC):
    """A smooth real function on ``R^n``."""

    n: int
    exact = False

    @abstractmethod
    def jet(self, x: np.ndarray, dirs: Sequence[np.ndarray], box: tuple[int, ...]) -> Jet:
        """Taylor jet of ``t -> f(x + sum_j t_j dirs[j])`` truncated to ``box``.

        ``x`` has shape ``batch + (n,)``.
        """

    def support_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """A box containing the support, or ``None`` if unknown/unbounded."""
        return None

    def support_corners(self) -> np.ndarray | None:
        """Corners of a parallelotope containing the support, shape ``(2^n, n)``.

        Defaults to the corners of :meth:`support_box`; pullbacks override it
        because the image of a box under a shear is far smaller than its
        bounding box.
        """
        return box_corners(self.support_box())

    def eval(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.jet(x, [], ()).value

    __call__ = eval

    def dirderiv(self, x, dirs: Sequence = (), max_order: int = MAX_ORDER) -> np.ndarray:
        """``D^q f(x) . (dirs[0], ..., dirs[q-1])``, vectorized over ``x``."""
        if len(dirs) > max_order:
            raise OrderTooLarge(f"derivative order {len(dirs)} exceeds the jet limit {max_order}")
        x = np.asarray(x, dtype=float)
        vecs, counts = _group_dirs(dirs)
        return self.jet(x, vecs, counts).derivative()

    # composition ------------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, SmoothFunction):
            return ProductFunction([self, other])
        return ScaledFunction(self, float(other))

    def __rmul__(self, other):
        return ScaledFunction(self, float(other))

    def __add__(self, other):
        if isinstance(other, SmoothFunction):
            return SumFunction([self, other])
        return SumFunction([self, ConstantFunction(float(other), self.n)])

    __radd__ = __add__

    def __neg__(self):
        return ScaledFunction(self, -1.0)

    def __sub__(self, other):
        return self + (-other)


# ---------------------------------------------------------------------------
# polynomials


class Polynomial(SmoothFunction):
    """Polynomial with exact rational coefficients, ``{exponent tuple: Fraction}``."""

    exact = True

    def __init__(self, terms: dict, n: int):
        self.n = n
        self.terms = {tuple(e): Fraction(c) for e, c in terms.items() if c != 0}
        for e in self.terms:
            if len(e) != n or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {n} variables")

    @classmethod
    def constant(cls, c, n: int) -> "Polynomial":
        return cls({(0,) * n: Fraction(c)}, n)

    @classmethod
    def variable(cls, i: int, n: int) -> "Polynomial":
        return cls({tuple(int(j == i) for j in range(n)): 1}, n)

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "Polynomial":
        n = len(coeffs)
        out = cls.constant(const, n)
        for i, c in enumerate(coeffs):
            out = out + cls.variable(i, n) * Fraction(c)
        return out

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n == other.n and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + " + ".join(parts) + ")"

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.n)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return super().__add__(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(out, self.n)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.n)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return super().__sub__(other)
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return super().__mul__(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(out, self.n)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return super().__rmul__(other)
        return self * o

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.constant(1, self.n)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = out.get(tuple(e2), 0) + c * e[i]
        return Polynomial(out, self.n)

    def directional(self, w: Sequence) -> "Polynomial":
        """Exact ``Df . w`` as a polynomial."""
        out = Polynomial({}, self.n)
        for i, wi in enumerate(w):
            if wi:
                out = out + self.diff(i) * Fraction(wi)
        return out

    def derivative_poly(self, dirs: Sequence) -> "Polynomial":
        p = self
        for w in dirs:
            p = p.directional(w)
        return p

    def evaluate(self, point: Sequence) -> Fraction:
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for xi, k in zip(pt, e):
                if k:
                    term *= xi ** k
            total += term
        return total

    def dirderiv_exact(self, point: Sequence, dirs: Sequence = ()) -> Fraction:
        return self.derivative_poly(dirs).evaluate(point)

    def compose_affine(self, A: Sequence[Sequence], t: Sequence) -> "Polynomial":
        """``y -> P(A y + t)`` where ``A`` is ``n x m``."""
        m = len(A[0]) if A and len(A[0]) else 0
        coords = [Polynomial.linear([Fraction(a) for a in A[i]], Fraction(t[i])) if m else Polynomial.constant(t[i], 0)
                  for i in range(self.n)]
        out = Polynomial({}, m)
        powers: dict = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(c, m)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in powers:
                        powers[(i, k)] = coords[i] ** k
                    term = term * powers[(i, k)]
            out = out + term
        return out

    def jet(self, x, dirs, box):
        x = np.asarray(x, dtype=float)
        batch = x.shape[:-1]
        if not self.terms:
            return Jet.constant(0.0, box, batch)
        X = [Jet.variable(x[..., i], [d[i] for d in dirs], box) for i in range(self.n)]
        cache: dict = {}
        out = Jet.constant(0.0, box, batch)
        for e, c in self.terms.items():
            term = None
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = X[i] ** k
                    term = cache[(i, k)] if term is None else term * cache[(i, k)]
            out = out + (float(c) if term is None else term * float(c))
        return out


# ---------------------------------------------------------------------------
# parsed expressions


def _scalar_call(func: str, v: float) -> float:
    if func == "log":
        if v <= 0:
            raise DomainError("log of a non-positive value")
        return math.log(v)
    if func == "sqrt":
        if v < 0:
            raise DomainError("sqrt of a negative value")
        return math.sqrt(v)
    try:
        return getattr(math, func)(v)
    except OverflowError:
        raise DomainError(f"{func} overflows at {v!r}") from None


def _jet_node(node: Node, X: list[Jet]):
    if isinstance(node, Const):
        return float(node.value)
    if isinstance(node, Var):
        return X[node.index]
    if isinstance(node, Neg):
        return -_jet_node(node.arg, X)
    if isinstance(node, BinOp):
        a = _jet_node(node.left, X)
        b = _jet_node(node.right, X)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if not isinstance(b, Jet) and b == 0:
            raise DomainError("division by zero")
        return a / b
    if isinstance(node, Pow):
        a = _jet_node(node.base, X)
        if not isinstance(a, Jet):
            if a == 0 and node.exponent < 0:
                raise DomainError("division by zero")
            return a ** node.exponent
        return a ** node.exponent
    if isinstance(node, Call):
        a = _jet_node(node.arg, X)
        if not isinstance(a, Jet):
            return _scalar_call(node.func, a)
        return getattr(a, node.func)()
    raise TypeError(node)


def _poly_node(node: Node, n: int) -> Polynomial | None:
    if isinstance(node, Const):
        return Polynomial.constant(node.value, n)
    if isinstance(node, Var):
        return Polynomial.variable(node.index, n)
    if isinstance(node, Neg):
        a = _poly_node(node.arg, n)
        return None if a is None else -a
    if isinstance(node, BinOp):
        a = _poly_node(node.left, n)
        b = _poly_node(node.right, n)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b.degree == 0:
            return a * (1 / b.terms[(0,) * n])
        return None
    if isinstance(node, Pow):
        a = _poly_node(node.base, n)
        if a is None:
            return None
        if node.exponent >= 0:
            return a ** node.exponent
        if a.degree == 0:
            return Polynomial.constant(a.terms[(0,) * n] ** node.exponent, n)
        return None
    return None


class ExpressionFunction(SmoothFunction):
    """A parsed expression evaluated with jet arithmetic."""

    def __init__(self, expr: Expression | str, n: int | None = None):
        if isinstance(expr, str):
            if n is None:
                raise ValueError("dimension required to parse an expression")
            expr = parse_expression(expr, n)
        self.expr = expr
        self.n = expr.n
        try:
            self.polynomial = _poly_node(expr.root, self.n)
        except ZeroDivisionError:
            self.polynomial = None

    def jet(self, x, dirs, box):
        x = np.asarray(x, dtype=float)
        batch = x.shape[:-1]
        X = [Jet.variable(x[..., i], [d[i] for d in dirs], box) for i in range(self.n)]
        out = _jet_node(self.expr.root, X)
        if not isinstance(out, Jet):
            return Jet.constant(out, box, batch)
        return out

    def __repr__(self):
        return f"ExpressionFunction({str(self.expr)!r})"


def as_polynomial(f: SmoothFunction) -> Polynomial | None:
    """The exact polynomial behind ``f``, if there is one."""
    if isinstance(f, Polynomial):
        return f
    return getattr(f, "polynomial", None)


def function_from_source(src: str, n: int) -> SmoothFunction:
    """Parse ``src``; polynomial expressions become exact :class:`Polynomial` objects."""
    ef = ExpressionFunction(src, n)
    return ef.polynomial if ef.polynomial is not None else ef


# ---------------------------------------------------------------------------
# composites


class ConstantFunction(SmoothFunction):
    def __init__(self, value: float, n: int):
        self.value, self.n = value, n

    def jet(self, x, dirs, box):
        return Jet.constant(self.value, box, np.asarray(x).shape[:-1])


def box_corners(box) -> np.ndarray | None:
    if box is None:
        return None
    return np.array(list(itertools.product(*zip(box[0], box[1]))), dtype=float)


class ScaledFunction(SmoothFunction):
    def __init__(self, f: SmoothFunction, scale: float):
        self.f, self.scale, self.n = f, scale, f.n

    def jet(self, x, dirs, box):
        return self.f.jet(x, dirs, box) * self.scale

    def support_box(self):
        return self.f.support_box()

    def support_corners(self):
        return self.f.support_corners()


class SumFunction(SmoothFunction):
    def __init__(self, parts: Sequence[SmoothFunction]):
        self.parts = list(parts)
        self.n = self.parts[0].n

    def jet(self, x, dirs, box):
        out = self.parts[0].jet(x, dirs, box)
        for p in self.parts[1:]:
            out = out + p.jet(x, dirs, box)
        return out

    def support_box(self):
        boxes = [p.support_box() for p in self.parts]
        if any(b is None for b in boxes):
            return None
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)


class ProductFunction(SmoothFunction):
    def __init__(self, parts: Sequence[SmoothFunction]):
        self.parts = list(parts)
        self.n = self.parts[0].n

    def jet(self, x, dirs, box):
        out = self.parts[0].jet(x, dirs, box)
        for p in self.parts[1:]:
            out = out * p.jet(x, dirs, box)
        return out

    def support_box(self):
        boxes = [b for b in (p.support_box() for p in self.parts) if b is not None]
        if not boxes:
            return None
        return np.max([b[0] for b in boxes], axis=0), np.min([b[1] for b in boxes], axis=0)

    def support_corners(self):
        bounded = [p for p in self.parts if p.support_box() is not None]
        if len(bounded) == 1:
            return bounded[0].support_corners()
        return box_corners(self.support_box())


class BumpCutoff(SmoothFunction):
    """Radial cutoff: 1 on the ball ``|x - center| <= r_in``, 0 outside ``r_out``."""

    def __init__(self, center: Sequence[float], r_in: float, r_out: float, profile: str = "exp"):
        if not 0 < r_in < r_out:
            raise ValueError("need 0 < r_in < r_out")
        self.center = np.asarray(center, dtype=float)
        self.n = len(self.center)
        self.r_in, self.r_out, self.profile = float(r_in), float(r_out), profile

    def jet(self, x, dirs, box):
        x = np.asarray(x, dtype=float)
        r2 = None
        for i in range(self.n):
            d = Jet.variable(x[..., i] - self.center[i], [w[i] for w in dirs], box)
            r2 = d * d if r2 is None else r2 + d * d
        u = (self.r_out ** 2 - r2) * (1.0 / (self.r_out ** 2 - self.r_in ** 2))
        return smoothstep(u, self.profile)

    def support_box(self):
        return self.center - self.r_out, self.center + self.r_out


def default_cutoff(vertices: Sequence[Sequence], profile: str = "exp") -> BumpCutoff:
    """Cutoff equal to 1 on the 1.1x dilation of the vertex set about its centroid."""
    V = np.asarray(vertices, dtype=float)
    c = V.mean(axis=0)
    R = float(np.max(np.linalg.norm(V - c, axis=1)))
    return BumpCutoff(c, 1.1 * R, 1.5 * R, profile)


class AffinePullback(SmoothFunction):
    """``y -> f(A y + t)``."""

    def __init__(self, f: SmoothFunction, A: Sequence[Sequence], t: Sequence):
        self.f = f
        self.A = np.asarray(A, dtype=float)
        self.t = np.asarray(t, dtype=float)
        self.n = self.A.shape[1]

    def jet(self, x, dirs, box):
        x = np.asarray(x, dtype=float)
        return self.f.jet(x @ self.A.T + self.t, [self.A @ np.asarray(w, dtype=float) for w in dirs], box)

    def support_box(self):
        b = self.f.support_box()
        if b is None or self.A.shape[0] != self.A.shape[1]:
            return None
        Ainv = np.linalg.inv(self.A)
        corners = np.array(list(itertools.product(*zip(b[0], b[1]))))
        pre = (corners - self.t) @ Ainv.T
        return pre.min(axis=0), pre.max(axis=0)

    def support_corners(self):
        inner = self.f.support_corners()
        if inner is None or self.A.shape[0] != self.A.shape[1]:
            return None
        return (inner - self.t) @ np.linalg.inv(self.A).T


def pullback(f: SmoothFunction, A: Sequence[Sequence], t: Sequence) -> SmoothFunction:
    """``f o (y -> A y + t)``, staying exact for polynomials."""
    p = as_polynomial(f)
    if p is not None:
        return p.compose_affine(A, t)
    return AffinePullback(f, A, t)


# ---------------------------------------------------------------------------
# finite differences (validation only)

_FD_STEP = {0: 1e-3, 1: 1e-2, 2: 4e-2, 3: 8e-2, 4: 1.6e-1}


def finite_difference_check(f: SmoothFunction, x: Sequence[float], dirs: Sequence = (), step: float | None = None,
                            levels: int = 5) -> float:
    """Nested central differences with two Richardson levels and step selection.

    The base step scales with ``1 + |x|`` and grows with the order.  Estimates
    are formed for ``levels`` halvings of it and the one that agrees best
    with its successor is returned, which balances truncation against
    round-off without tuning per function.
    """
    q = len(dirs)
    x = np.asarray(x, dtype=float)
    if q == 0:
        return float(f.eval(x))
    if q > 4:
        raise OrderTooLarge("finite differences are limited to order 4")
    W = np.array([[float(c) for c in w] for w in dirs])
    scale = max(float(np.max(np.linalg.norm(W, axis=1))), 1e-300)
    h0 = (step if step is not None else _FD_STEP[q]) * (1.0 + float(np.linalg.norm(x))) / scale
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=q)))
    weights = np.prod(signs, axis=1)
    cache: dict[int, float] = {}

    def nested(k):
        if k not in cache:
            h = h0 / 2 ** k
            pts = x + h * (signs @ W)
            cache[k] = float(np.dot(weights, f.eval(pts))) / (2.0 * h) ** q
        return cache[k]

    def richardson(k):
        e0, e1, e2 = nested(k), nested(k + 1), nested(k + 2)
        r0 = (4 * e1 - e0) / 3
        r1 = (4 * e2 - e1) / 3
        return (16 * r1 - r0) / 15

    est = [richardson(k) for k in range(max(levels, 2))]
    gaps = [abs(a - b) for a, b in zip(est, est[1:])]
    return est[int(np.argmin(gaps)) + 1]
