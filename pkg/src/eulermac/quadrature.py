"""Integration over boxes, simplices, polytopes and lattice-normalized faces.

The numerical path is adaptive tensor Gauss-Legendre on boxes, with
simplices reached through Duffy-type collapse maps.  Polynomials can instead
be integrated exactly over simplices with the monomial formula
``int_simplex lambda^beta = beta! / (|beta| + d)!``.

``integrate_face_star`` integrates in the face's lattice parameters, where
one lattice step has measure 1; that is the normalized face measure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .functions import Polynomial, SmoothFunction, as_polynomial, box_corners
from .geometry import DelzantPolytope, Face, RegularWedge, det

Integrand = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 20
    order: int = 10
    # tensor rule order used for 3-D boxes; 10^3 nodes per box is wasteful
    volume_order: int = 6
    max_evals: int = 50_000_000
    chunk: int = 20_000
    # uniform pre-refinement to this panel width, for integrands that live in
    # thin bands a coarse rule can miss entirely; only applied up to 2-D
    min_width: float = 0.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.order < 1 or self.volume_order < 1 or self.max_subdivisions < 0:
            raise ValueError("rule orders must be >= 1 and max_subdivisions >= 0")


class ToleranceNotReached(ArithmeticError):
    def __init__(self, value: float, estimate: float, message: str = ""):
        self.value = value
        self.estimate = estimate
        super().__init__(message or f"quadrature stopped at {value!r} with error estimate {estimate:.3g}")


@dataclass(frozen=True)
class FaceIntegral:
    face: Face
    value: float | Fraction
    normalized: bool = True


@lru_cache(maxsize=None)
def _tensor_rule(order: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x = (x + 1) / 2
    w = w / 2
    nodes = np.array(list(itertools.product(x, repeat=d)))
    weights = np.prod(np.array(list(itertools.product(w, repeat=d))), axis=1)
    return nodes, weights


@lru_cache(maxsize=None)
def _child_offsets(d: int) -> np.ndarray:
    return np.array(list(itertools.product((0.0, 0.5), repeat=d)))


def _evaluate(g: Integrand, pts: np.ndarray, chunk: int) -> np.ndarray:
    out = np.empty(len(pts))
    for s in range(0, len(pts), chunk):
        out[s:s + chunk] = g(pts[s:s + chunk])
    return out


def _apply_rule(g, L, H, nodes, weights, chunk):
    """Tensor rule on each box; returns (values, abs-values)."""
    width = H - L
    pts = L[:, None, :] + width[:, None, :] * nodes[None, :, :]
    vals = _evaluate(g, pts.reshape(-1, L.shape[1]), chunk).reshape(len(L), len(nodes))
    vol = np.prod(width, axis=1)
    return vals @ weights * vol, np.abs(vals) @ weights * vol


def _split(L, H, offs):
    width = (H - L) / 2
    CL = (L[:, None, :] + offs[None, :, :] * (H - L)[:, None, :]).reshape(-1, L.shape[1])
    CH = CL + np.repeat(width, len(offs), axis=0)
    return CL, CH


def integrate_box(g: Integrand, lo: Sequence[float], hi: Sequence[float],
                  cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Globally adaptive integral of a vectorized ``g`` over ``[lo, hi]``.

    Every leaf box carries its own rule value and the sum over its ``2^d``
    children; their difference is the leaf's error estimate and the children
    sum is its value.  Each round splits the leaves holding the largest half
    of the total error until the total is within tolerance.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = len(lo)
    if d == 0:
        return float(g(np.zeros((1, 0)))[0])
    if np.any(hi <= lo):
        return 0.0
    nodes, weights = _tensor_rule(cfg.order if d <= 2 else cfg.volume_order, d)
    offs = _child_offsets(d)
    nchild = len(offs)

    def refine(L, H, coarse):
        CL, CH = _split(L, H, offs)
        cv, ca = _apply_rule(g, CL, CH, nodes, weights, cfg.chunk)
        cv = cv.reshape(-1, nchild)
        fine = cv.sum(axis=1)
        err = np.abs(fine - coarse)
        # below this the estimate is round-off, not truncation
        err = np.where(err <= 64 * _EPS * ca.reshape(-1, nchild).sum(axis=1), 0.0, err)
        return fine, err, cv

    L, H = lo[None, :], hi[None, :]
    if cfg.min_width > 0 and d <= 2:
        start = max(0, math.ceil(math.log2(float(np.max(hi - lo)) / cfg.min_width)))
        for _ in range(min(start, cfg.max_subdivisions)):
            L, H = _split(L, H, offs)
    coarse, _ = _apply_rule(g, L, H, nodes, weights, cfg.chunk)
    fine, err, cv = refine(L, H, coarse)
    level = np.zeros(len(L), dtype=int)
    evals = len(L) * len(nodes) * (1 + nchild)
    while True:
        value = math.fsum(fine)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(value))
        total_err = float(err.sum())
        if total_err <= tol:
            return value
        order = np.argsort(-err, kind="stable")
        splittable = order[level[order] < cfg.max_subdivisions]
        if len(splittable) == 0 or float(err[splittable].sum()) <= total_err - tol:
            raise ToleranceNotReached(value, total_err, "quadrature hit the subdivision limit")
        cum = np.cumsum(err[splittable])
        take = splittable[: int(np.searchsorted(cum, 0.5 * cum[-1])) + 1]
        cost = len(take) * nchild * nchild * len(nodes)
        if evals + cost > cfg.max_evals:
            raise ToleranceNotReached(value, total_err, "quadrature evaluation budget exhausted")
        evals += cost
        CL, CH = _split(L[take], H[take], offs)
        cfine, cerr, ccv = refine(CL, CH, cv[take].reshape(-1))
        keep = np.ones(len(L), dtype=bool)
        keep[take] = False
        L = np.concatenate([L[keep], CL])
        H = np.concatenate([H[keep], CH])
        fine = np.concatenate([fine[keep], cfine])
        err = np.concatenate([err[keep], cerr])
        cv = np.concatenate([cv[keep], ccv])
        level = np.concatenate([level[keep], np.repeat(level[take] + 1, nchild)])


# ---------------------------------------------------------------------------
# simplices


def duffy_map(verts: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse map from the unit cube onto the simplex ``verts`` (shape (d+1, d)).

    ``x = p0 + sum_k (s_1 ... s_k)(p_k - p_{k-1})``; returns points and Jacobians.
    """
    d = verts.shape[1]
    steps = np.diff(verts, axis=0)
    jac0 = abs(np.linalg.det(steps.T)) if d else 1.0
    prods = np.cumprod(s, axis=1)
    x = verts[0] + prods @ steps
    jac = jac0 * np.prod(s ** np.arange(d - 1, -1, -1), axis=1)
    return x, jac


def integrate_simplex(g: Integrand, verts: Sequence[Sequence[float]], cfg: QuadratureConfig = QuadratureConfig()) -> float:
    V = np.asarray([[float(c) for c in v] for v in verts], dtype=float)
    d = V.shape[1]
    if d == 0:
        return float(g(np.zeros((1, 0)))[0])

    def pulled(s):
        x, jac = duffy_map(V, s)
        return g(x) * jac

    return integrate_box(pulled, np.zeros(d), np.ones(d), cfg)


def simplex_monomial_integral(beta: Sequence[int]) -> Fraction:
    """Integral of ``lambda^beta`` over the standard simplex of dimension ``len(beta)``."""
    d = len(beta)
    return Fraction(math.prod(math.factorial(b) for b in beta), math.factorial(sum(beta) + d))


def exact_simplex_integral(p: Polynomial, verts: Sequence[Sequence]) -> Fraction:
    """Exact integral of ``p`` over the simplex with vertices ``verts`` (in R^d, d = p.n)."""
    P0 = [Fraction(c) for c in verts[0]]
    d = len(verts) - 1
    if d == 0:
        return p.evaluate(P0)
    A = [[Fraction(verts[k + 1][i]) - P0[i] for k in range(d)] for i in range(len(P0))]
    q = p.compose_affine(A, P0)
    jac = abs(det(A)) if len(P0) == d else None
    if jac is None:
        raise ValueError("exact simplex integration needs a full-dimensional simplex")
    return jac * sum((c * simplex_monomial_integral(e) for e, c in q.terms.items()), Fraction(0))


# ---------------------------------------------------------------------------
# triangulation


def triangulate(poly: DelzantPolytope, active: tuple[int, ...] = ()) -> list[tuple[int, ...]]:
    """Pulling triangulation of the face with the given active facets.

    Returns simplices as tuples of vertex indices.  Cones the first vertex of
    the face over a triangulation of each subfacet not containing it.
    """
    active = tuple(sorted(active))
    face_vis = [i for i, inc in enumerate(poly.incidence) if set(active) <= inc]
    if len(face_vis) == 1:
        return [(face_vis[0],)]
    base = face_vis[0]
    out = []
    sub_facets = sorted({j for i in face_vis for j in poly.incidence[i]} - set(active))
    for j in sub_facets:
        sub = tuple(sorted(active + (j,)))
        sub_vis = [i for i in face_vis if j in poly.incidence[i]]
        if base in sub_vis:
            continue
        # a genuine subfacet has dimension one less than the face
        if not _is_face(poly, sub, len(active) + 1):
            continue
        for simplex in triangulate(poly, sub):
            out.append((base,) + simplex)
    return out


def _is_face(poly: DelzantPolytope, active: tuple[int, ...], codim: int) -> bool:
    return any(f.active == active for f in poly.faces.get(codim, ()))


# ---------------------------------------------------------------------------
# regions


def _wedge_ybox(wedge: RegularWedge, f: SmoothFunction, box=None) -> tuple[np.ndarray, np.ndarray]:
    """Box in wedge coordinates containing the support of ``f`` (or ``box``)."""
    corners = box_corners(box) if box is not None else f.support_corners()
    if corners is None:
        raise ValueError("wedge integrals need a bounded support box for the integrand")
    y = wedge.to_local(corners)
    return y.min(axis=0), y.max(axis=0)


def integrate_region(region, f: SmoothFunction, cfg: QuadratureConfig = QuadratureConfig(),
                     exact: bool = False, box=None):
    """``int_region f dx`` over a polytope, or over a wedge cut to ``f``'s support box.

    With ``exact=True`` and a polynomial ``f`` over a polytope the result is a
    :class:`~fractions.Fraction`.
    """
    if isinstance(region, DelzantPolytope):
        p = as_polynomial(f)
        simplices = triangulate(region)
        if exact and p is not None:
            return sum((exact_simplex_integral(p, [region.vertices[i] for i in s]) for s in simplices), Fraction(0))
        return math.fsum(integrate_simplex(f.eval, [region.vertices[i] for i in s], cfg) for s in simplices)
    if isinstance(region, RegularWedge):
        return integrate_face_star(region.face(()), f, cfg, box=box)
    raise TypeError(f"cannot integrate over {type(region).__name__}")


def integrate_face_star(face: Face, f: SmoothFunction, cfg: QuadratureConfig = QuadratureConfig(),
                        dirs: Sequence = (), exact: bool = False, box=None):
    """Lattice-normalized integral of ``D^k f . dirs`` over ``face``.

    Vertices are point evaluations.  Wedge faces are restricted to ``box``
    (default: ``f.support_box()``).
    """
    p = as_polynomial(f)
    use_exact = exact and p is not None
    if use_exact:
        g_poly = p.derivative_poly(dirs)
        if face.dim == 0:
            return g_poly.evaluate(face.affine_point)
    if face.dim == 0:
        return float(f.dirderiv(np.array([[float(c) for c in face.affine_point]]), dirs)[0])

    x0 = np.array([float(c) for c in face.affine_point])
    B = np.array(face.tangent_basis, dtype=float)  # rows span the face

    def g(s):
        x = x0 + s @ B
        return f.dirderiv(x, dirs)

    if isinstance(face.owner, RegularWedge):
        if use_exact:
            raise ValueError("exact integration over unbounded wedge faces is not supported")
        wedge = face.owner
        lo, hi = _wedge_ybox(wedge, f, box)
        if any(not (lo[i] <= 0.0 <= hi[i]) for i in face.active):
            return 0.0
        free = [j for j in range(wedge.n) if j not in face.active]
        return integrate_box(g, lo[free], np.minimum(hi[free], 0.0), cfg)

    poly: DelzantPolytope = face.owner
    param = dict(zip(face.vertices, face.param_vertices))
    simplices = triangulate(poly, face.active)
    if use_exact:
        A = [[Fraction(b[i]) for b in face.tangent_basis] for i in range(poly.n)]
        q = g_poly.compose_affine(A, face.affine_point)
        return sum((exact_simplex_integral(q, [param[poly.vertices[i]] for i in s]) for s in simplices), Fraction(0))
    return math.fsum(integrate_simplex(g, [param[poly.vertices[i]] for i in s], cfg) for s in simplices)


def check_stokes_identity(face: Face, j: int, f: SmoothFunction, cfg: QuadratureConfig = QuadratureConfig(),
                          box=None) -> tuple[float, float]:
    """Both sides of ``int*_F Dg . v_j = int*_{F cap H_j} g`` for a wedge face.

    ``j`` must be a facet of the wedge that is not active on ``face``.
    """
    wedge = face.owner
    if not isinstance(wedge, RegularWedge):
        raise TypeError("the identity is checked on wedge faces")
    if j in face.active:
        raise ValueError(f"facet {j} is already active on {face.active}")
    lhs = integrate_face_star(face, f, cfg, dirs=[wedge.dual[j]], box=box)
    rhs = integrate_face_star(wedge.face(face.active + (j,)), f, cfg, box=box)
    return lhs, rhs
