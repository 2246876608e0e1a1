"""Euler-MacLaurin coefficients ``T_q`` of lattice Riemann sums.

For a region ``R`` and smooth ``f``,

    (1/N^n) sum_{k in Z^n cap N R} f(k/N)  ~  sum_q T_q(R, f) N^{-q}.

Four routes compute the ``T_q``:

* :func:`wedge_expansion`: regular wedges in any dimension, as a sum over
  multi-indices of Todd weights times normalized face integrals.
* :func:`polygon_expansion`: closed-form edge and vertex operators for
  Delzant polygons, exact when ``f`` is a polynomial.
* :func:`partition_expansion`: any Delzant polytope, by splitting ``f`` with
  a partition of unity subordinate to the vertex wedges.
* :func:`gs_todd_oracle`: the Todd operator in the facet offsets applied to
  the perturbed-wedge volume integral by finite differences (validation).
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import lambda_alpha, multi_indices, todd_coefficients
from .functions import MAX_ORDER, SmoothFunction, as_polynomial
from .geometry import (DelzantPolytope, GeometryError, RegularWedge, edge_data, vertex_frame)
from .jets import Jet, smoothstep
from .quadrature import QuadratureConfig, _wedge_ybox, integrate_box, integrate_face_star, integrate_region

Number = float | Fraction


@dataclass(frozen=True)
class TermRecord:
    """One contribution: order, face, codimension and the derivative directions used."""

    order: int
    face: str
    codim: int
    derivative_order: int
    directions: tuple[tuple, ...]
    value: Number


@dataclass
class ExpansionResult:
    Q: int
    T: list[Number]
    breakdown: dict[str, list[Number]]
    method: str
    exact: bool
    terms: list[TermRecord] = field(default_factory=list)

    def partial_sum(self, N: int, Q: int | None = None) -> Number:
        """``sum_{q <= Q} T_q N^{-q}``; exact if every coefficient is."""
        Q = self.Q if Q is None else Q
        if self.exact:
            return sum((Fraction(t) / Fraction(N) ** q for q, t in enumerate(self.T[:Q + 1])), Fraction(0))
        return math.fsum(float(t) / float(N) ** q for q, t in enumerate(self.T[:Q + 1]))

    def _add(self, q: int, key: str, value: Number):
        self.T[q] = self.T[q] + value
        self.breakdown.setdefault(key, [0] * (self.Q + 1))
        self.breakdown[key][q] = self.breakdown[key][q] + value

    def __add__(self, other: "ExpansionResult") -> "ExpansionResult":
        if self.Q != other.Q:
            raise ValueError("cannot add expansions of different orders")
        out = ExpansionResult(self.Q, [a + b for a, b in zip(self.T, other.T)], {}, self.method,
                              self.exact and other.exact, self.terms + other.terms)
        for src in (self.breakdown, other.breakdown):
            for k, v in src.items():
                cur = out.breakdown.setdefault(k, [0] * (self.Q + 1))
                out.breakdown[k] = [a + b for a, b in zip(cur, v)]
        return out


def _empty(Q: int, method: str, exact: bool) -> ExpansionResult:
    zero = Fraction(0) if exact else 0.0
    return ExpansionResult(Q, [zero] * (Q + 1), {}, method, exact)


def _check_order(Q: int, cap: int = MAX_ORDER):
    if Q < 0:
        raise ValueError(f"order must be non-negative, got {Q}")
    if Q > cap:
        raise ValueError(f"order {Q} exceeds the supported maximum {cap}")


# ---------------------------------------------------------------------------
# wedges


def wedge_expansion(W: RegularWedge, f: SmoothFunction, Q: int, cfg: QuadratureConfig = QuadratureConfig(),
                    box=None, support: tuple[DelzantPolytope, int] | None = None,
                    exact: bool | None = None) -> ExpansionResult:
    """``T_q(W, f) = sum_{|alpha|=q} lambda_alpha int*_{F(alpha)} D^{q-nu} f . v_{alpha - r(alpha)}``.

    ``F(alpha)`` is the face cut out by the facets with ``alpha_i > 0`` (the
    whole wedge when there are none).  Face integrals are restricted to
    ``box`` (default ``f.support_box()``).  When ``support = (poly, i)``
    says ``W`` is the wedge of vertex ``i`` of ``poly`` and ``f`` vanishes on
    ``W`` outside ``poly``, each face integral runs over the matching face of
    ``poly`` instead, which is bounded and admits the exact path.
    """
    _check_order(Q)
    p = as_polynomial(f)
    if exact is None:
        exact = support is not None and p is not None
    if exact and (support is None or p is None):
        raise ValueError("the exact wedge path needs a polynomial f and a bounded support polytope")
    res = _empty(Q, "wedge", exact)
    mapping = None
    if support is not None:
        poly, vi = support
        mapping = poly.wedge_facets(vi)
    for q in range(Q + 1):
        for alpha in multi_indices(W.n, q):
            lam = lambda_alpha(alpha)
            if lam == 0:
                continue
            dirs = [W.dual[i] for i, a in enumerate(alpha.reduced) for _ in range(a)]
            if mapping is None:
                face = W.face(alpha.active)
                val = integrate_face_star(face, f, cfg, dirs=dirs, box=box)
            else:
                face = poly.face(tuple(sorted(mapping[i] for i in alpha.active)))
                val = integrate_face_star(face, f, cfg, dirs=dirs, exact=exact)
            contrib = lam * val if exact else float(lam) * val
            label = face.label if mapping is not None else f"face{{{','.join(map(str, alpha.active))}}}"
            res._add(q, label, contrib)
            res.terms.append(TermRecord(q, label, alpha.nu, q - alpha.nu, tuple(tuple(d) for d in dirs), contrib))
    return res


def interval_expansion(a: int, b: int, f: SmoothFunction, Q: int, cfg: QuadratureConfig = QuadratureConfig(),
                       exact: bool | None = None) -> ExpansionResult:
    """One-dimensional case ``[a, b]``: ``T_q = b_q/q! (f^(q-1)(b) + (-1)^(q-1) f^(q-1)(a))``."""
    _check_order(Q)
    p = as_polynomial(f)
    exact = p is not None if exact is None else exact
    from .geometry import build_polytope
    seg = build_polytope(facets=[((-1,), -a), ((1,), b)])
    res = _empty(Q, "interval", exact)
    res._add(0, "interior", integrate_region(seg, f, cfg, exact=exact))
    bc = todd_coefficients(Q).b
    for q in range(1, Q + 1):
        if bc[q] == 0:
            continue
        dirs = [(1,)] * (q - 1)
        for end, sign in ((b, 1), (a, (-1) ** (q - 1))):
            if exact:
                d = p.dirderiv_exact((end,), dirs)
                val = bc[q] / math.factorial(q) * sign * d
            else:
                d = float(f.dirderiv(np.array([[float(end)]]), dirs)[0])
                val = float(bc[q]) / math.factorial(q) * sign * d
            label = f"vertex ({end})"
            res._add(q, label, val)
            res.terms.append(TermRecord(q, label, 1, q - 1, tuple(dirs), val))
    return res


# ---------------------------------------------------------------------------
# polygons


def _edge_coefficient(q: int) -> Fraction:
    # c_q = (-1)^(q-1) b_q / q!
    return (-1) ** (q - 1) * todd_coefficients(q).b[q] / math.factorial(q)


def polygon_expansion(poly: DelzantPolytope, f: SmoothFunction, Q: int, cfg: QuadratureConfig = QuadratureConfig(),
                      exact: bool | None = None) -> ExpansionResult:
    """Closed-form ``T_q`` for a Delzant polygon.

    With ``c_q = (-1)^(q-1) b_q / q!``, inward edge directions ``w1, w2`` at
    each vertex and the edge/vertex constants ``zeta``, ``eta``:

    * ``T_0 = int f``;
    * edge ``e``: ``c_q zeta^(q-1) int*_e D^(q-1) f . n_e^(q-1)`` (``q >= 1``);
    * vertex ``v`` (``q >= 2``):
      ``(-1)^q sum_{a+b=q} b_a b_b/(a! b!) D^(q-2) f(v) . (w1^(a-1), w2^(b-1))``
      ``- c_q sum_{e at v} eta_e sum_j zeta_e^j D^(q-2) f(v) . (n_e^j, w_other^(q-2-j))``.

    For ``q = 2`` the vertex term is ``(1/4 + mu/12) f(v)``; for odd ``q >= 3``
    only vertex terms survive.
    """
    poly._require_polygon()
    _check_order(Q)
    p = as_polynomial(f)
    exact = p is not None if exact is None else exact
    if exact and p is None:
        raise ValueError("the exact polygon path needs a polynomial f")
    res = _empty(Q, "polygon-closed-form", exact)
    num = (lambda x: x) if exact else float

    res._add(0, "interior", integrate_region(poly, f, cfg, exact=exact))
    res.terms.append(TermRecord(0, "interior", 0, 0, (), res.T[0]))
    if Q == 0:
        return res

    edges = {e.active[0]: (e, edge_data(poly, e.active[0])) for e in poly.faces[1]}
    for q in range(1, Q + 1):
        cq = _edge_coefficient(q)
        if cq == 0:
            continue
        for k, (face, ed) in edges.items():
            dirs = [ed.normal] * (q - 1)
            val = num(cq * ed.zeta ** (q - 1)) * integrate_face_star(face, f, cfg, dirs=dirs, exact=exact)
            res._add(q, face.label, val)
            res.terms.append(TermRecord(q, face.label, 1, q - 1, tuple(dirs), val))

    bc = todd_coefficients(Q).b
    for vi, vertex in enumerate(poly.vertices):
        fr = vertex_frame(poly, vi)
        label = f"vertex ({vertex[0]},{vertex[1]})"
        along = {fr.edge1: (fr.eta1, fr.w2), fr.edge2: (fr.eta2, fr.w1)}
        point = np.array([[float(c) for c in vertex]])

        def deriv(dirs):
            if exact:
                return p.dirderiv_exact(vertex, dirs)
            return float(f.dirderiv(point, dirs)[0])

        for q in range(2, Q + 1):
            total = Fraction(0) if exact else 0.0
            for a in range(1, q):
                b = q - a
                coef = (-1) ** q * bc[a] * bc[b] / (math.factorial(a) * math.factorial(b))
                if coef == 0:
                    continue
                total += num(coef) * deriv([fr.w1] * (a - 1) + [fr.w2] * (b - 1))
            cq = _edge_coefficient(q)
            if cq != 0:
                for e, (eta, w_other) in along.items():
                    ed = edges[e][1]
                    for j in range(q - 1):
                        coef = -cq * eta * ed.zeta ** j
                        if coef != 0:
                            total += num(coef) * deriv([ed.normal] * j + [w_other] * (q - 2 - j))
            res._add(q, label, total)
            res.terms.append(TermRecord(q, label, 2, q - 2, (fr.w1, fr.w2), total))
    return res


# ---------------------------------------------------------------------------
# partition of unity


class PartitionFailure(ArithmeticError):
    pass


def _sub(jet: Jet, mask: np.ndarray) -> Jet:
    return Jet(jet.c[(slice(None),) * jet.k + (mask,)], jet.box)


@dataclass(frozen=True)
class PartitionOfUnity:
    """Vertex weights ``rho_i = phi_i / sum_k phi_k`` on a Delzant polytope.

    ``phi_i = prod_{j not incident to i} psi(slack_j / delta)`` with
    ``psi(t) = 0`` for ``t <= 1/2`` and ``1`` for ``t >= 1``; slacks are
    ``c_j - <u_j, x>``, so ``delta`` is measured in lattice distance.
    """

    poly: DelzantPolytope
    delta: float
    profile: str = "exp"

    @classmethod
    def default(cls, poly: DelzantPolytope, delta: float | None = None, profile: str = "exp") -> "PartitionOfUnity":
        return cls(poly, default_delta(poly) if delta is None else float(delta), profile)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def _phi(self, i: int, x: np.ndarray, dirs, box) -> Jet:
        out = Jet.constant(1.0, box, x.shape[:-1])
        for j in range(self.poly.num_facets):
            if j in self.poly.incidence[i]:
                continue
            u, c = self.poly.normals[j], self.poly.offsets[j]
            slack = Jet.variable(c - x @ np.asarray(u, dtype=float),
                                 [-float(np.dot(u, w)) for w in dirs], box)
            out = out * smoothstep(slack * (2.0 / self.delta) - 1.0, self.profile)
        return out

    def phis(self, x: np.ndarray, dirs=(), box=()) -> list[Jet]:
        x = np.asarray(x, dtype=float)
        return [self._phi(i, x, dirs, box) for i in range(len(self.poly.vertices))]

    def weights(self, x) -> np.ndarray:
        """``rho_i(x)`` for every vertex; last axis indexes vertices."""
        ph = np.stack([p.value for p in self.phis(x)], axis=-1)
        s = ph.sum(axis=-1, keepdims=True)
        return np.divide(ph, s, out=np.zeros_like(ph), where=s > 0)

    def check(self, per_axis: int = 21, floor: float = 1e-3) -> float:
        """Minimum of ``sum_i phi_i`` over a grid on the polytope; raises below ``floor``."""
        lo, hi = self.poly.bounding_box()
        axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
        pts = np.array(list(itertools.product(*axes)))
        pts = pts[np.all(self.poly.slacks(pts) >= -1e-12, axis=1)]
        total = sum(p.value for p in self.phis(pts))
        m = float(np.min(total))
        if m < floor:
            raise PartitionFailure(f"partition of unity degenerates (min sum {m:.3g}); try a smaller delta than {self.delta}")
        return m

    def piece(self, i: int, f: SmoothFunction) -> "PartitionPiece":
        return PartitionPiece(self, i, f)


class PartitionPiece(SmoothFunction):
    """``rho_i * f``, evaluating ``f`` only where ``rho_i`` is nonzero."""

    def __init__(self, pou: PartitionOfUnity, i: int, f: SmoothFunction):
        self.pou, self.i, self.f, self.n = pou, i, f, f.n

    def jet(self, x, dirs, box):
        x = np.asarray(x, dtype=float)
        phi_i = self.pou._phi(self.i, x, dirs, box)
        mask = phi_i.value != 0
        out = Jet.constant(0.0, box, x.shape[:-1])
        if not np.any(mask):
            return out
        xm = x[mask]
        total = None
        for k in range(len(self.pou.poly.vertices)):
            ph = _sub(phi_i, mask) if k == self.i else self.pou._phi(k, xm, dirs, box)
            total = ph if total is None else total + ph
        piece = _sub(phi_i, mask) / total * self.f.jet(xm, dirs, box)
        out.c[(slice(None),) * out.k + (mask,)] = piece.c
        return out


def default_delta(poly: DelzantPolytope) -> float:
    """A quarter of the smallest slack of a vertex with respect to a facet not through it."""
    best = None
    for i, v in enumerate(poly.vertices):
        for j, (u, c) in enumerate(zip(poly.normals, poly.offsets)):
            if j not in poly.incidence[i]:
                s = c - sum(a * b for a, b in zip(u, v))
                best = s if best is None else min(best, s)
    if best is None:
        raise GeometryError("every facet passes through every vertex")
    return best / 4


def partition_expansion(poly: DelzantPolytope, f: SmoothFunction, Q: int, cfg: QuadratureConfig = QuadratureConfig(),
                        delta: float | None = None, profile: str = "exp") -> ExpansionResult:
    """``T_q(poly, f) = sum_i T_q(W_i, rho_i f)`` over the vertex wedges ``W_i``."""
    _check_order(Q)
    pou = PartitionOfUnity.default(poly, delta, profile)
    pou.check()
    # the derivative integrands of rho_i live in bands of width delta / 2
    cfg = dataclasses.replace(cfg, min_width=min(cfg.min_width or np.inf, pou.delta / 8))
    res = _empty(Q, "polytope-pou", False)
    for i in range(len(poly.vertices)):
        part = wedge_expansion(poly.vertex_wedge(i), pou.piece(i, f), Q, cfg, support=(poly, i), exact=False)
        res = res + part
    res.method = f"polytope{poly.n}-pou"
    return res


def polytope3_expansion(poly: DelzantPolytope, f: SmoothFunction, Q: int = 3, delta: float | None = None,
                        cfg: QuadratureConfig | None = None, profile: str = "exp") -> ExpansionResult:
    if poly.n != 3:
        raise GeometryError(f"expected a 3-dimensional polytope, got dimension {poly.n}")
    return partition_expansion(poly, f, Q, cfg or THREE_D_CONFIG, delta, profile)


# the children-vs-parent estimate overstates the error by orders of magnitude here
THREE_D_CONFIG = QuadratureConfig(abs_tol=1e-7, rel_tol=1e-7, max_subdivisions=12)


def expand(poly: DelzantPolytope, f: SmoothFunction, Q: int, cfg: QuadratureConfig = QuadratureConfig(),
           delta: float | None = None) -> ExpansionResult:
    """Pick the route by dimension: interval, polygon closed form, or partition of unity."""
    if poly.n == 1:
        a = -poly.offsets[[u[0] for u in poly.normals].index(-1)]
        b = poly.offsets[[u[0] for u in poly.normals].index(1)]
        return interval_expansion(a, b, f, Q, cfg)
    if poly.n == 2:
        return polygon_expansion(poly, f, Q, cfg)
    return polytope3_expansion(poly, f, Q, delta, cfg)


# ---------------------------------------------------------------------------
# finite-difference Todd oracle

# (offsets, weights) with D^k g(0) ~ sum w g(o s) / s^k
_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def gs_todd_oracle(W: RegularWedge, f: SmoothFunction, Q: int, cfg: QuadratureConfig | None = None,
                   step: float = 0.02, box=None) -> ExpansionResult:
    """``T_q = sum_{|alpha|=q} lambda_alpha d^alpha/dh^alpha int_{W_h} f`` at ``h = 0``.

    ``W_h`` moves facet ``i`` out by ``h_i``; derivatives are tensor central
    differences with one Richardson step, so this is limited to ``Q <= 4``.
    """
    if Q > 4:
        raise ValueError("the finite-difference Todd oracle supports Q <= 4")
    _check_order(Q)
    cfg = cfg or QuadratureConfig(abs_tol=1e-15, rel_tol=1e-14, max_subdivisions=25)
    lo, hi = _wedge_ybox(W, f, box)
    cache: dict[tuple, float] = {}

    def g(y):
        return f.eval(W.from_local(y))

    def volume(h: tuple) -> float:
        if h not in cache:
            cache[h] = integrate_box(g, lo, np.minimum(hi, np.array(h)), cfg)
        return cache[h]

    def mixed(alpha, s):
        total = 0.0
        for combo in itertools.product(*(zip(*_STENCILS[a]) for a in alpha)):
            h = tuple(o * s for o, _ in combo)
            wt = math.prod(w for _, w in combo)
            total += wt * volume(h)
        return total / s ** sum(alpha)

    res = _empty(Q, "gs-oracle", False)
    for q in range(Q + 1):
        for alpha in multi_indices(W.n, q):
            lam = lambda_alpha(alpha)
            if lam == 0:
                continue
            a = alpha.alpha
            d = mixed(a, step) if q == 0 else (4 * mixed(a, step / 2) - mixed(a, step)) / 3
            res._add(q, f"alpha{a}", float(lam) * d)
    return res
