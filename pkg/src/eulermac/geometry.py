"""Regular lattice wedges, Delzant polytopes and their faces.

Wedges and polytopes are given by inequalities ``<u_i, x> <= c_i`` with
primitive integer normals ``u_i`` and integer offsets ``c_i``.  Everything
here is exact (integers and ``Fraction``); floats only appear in the
Euclidean normalization constants ``K``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

IntVec = tuple[int, ...]


class GeometryError(ValueError):
    """Base class for invalid lattice geometry."""


class NotPrimitive(GeometryError):
    pass


class NotRegular(GeometryError):
    pass


class NotSimple(GeometryError):
    pass


class NonIntegerVertex(GeometryError):
    pass


class Unbounded(GeometryError):
    pass


class PolytopeFormatError(GeometryError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# exact integer / rational linear algebra


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def vgcd(v: Sequence[int]) -> int:
    return math.gcd(*(int(x) for x in v))


def is_primitive(v: Sequence[int]) -> bool:
    return vgcd(v) == 1


def primitive(v: Sequence) -> IntVec:
    """Primitive integer vector in the direction of a rational vector ``v``."""
    fr = [Fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in fr))
    ints = [int(x * den) for x in fr]
    g = vgcd(ints)
    if g == 0:
        raise GeometryError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)


def det(M: Sequence[Sequence]) -> Fraction:
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            out = -out
        out *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return out


def inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def solve(M: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    Minv = inverse(M)
    return [sum(Fraction(m) * Fraction(x) for m, x in zip(row, b)) for row in Minv]


def _as_int_vec(v: Sequence, what: str) -> IntVec:
    out = []
    for x in v:
        fx = Fraction(x)
        if fx.denominator != 1:
            raise GeometryError(f"{what} must be integer, got {tuple(v)}")
        out.append(int(fx))
    return tuple(out)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# faces and wedges


@dataclass(frozen=True)
class Face:
    """A face ``F`` cut out by the facets in ``active``.

    Points of the face are ``affine_point + sum_j s_j * tangent_basis[j]``.
    For a wedge face the basis vectors are the dual vectors ``v_j`` (j not
    active) and the parameters range over ``s_j <= 0``; for a polytope face
    the basis is a lattice basis of the face's direction lattice and the
    parameter domain is the convex hull of ``param_vertices``.  In both cases
    the parameter Lebesgue measure is the lattice-normalized measure, and
    ``K`` is its density relative to the Euclidean face measure.
    """

    owner: object = field(repr=False, compare=False)
    active: tuple[int, ...]
    codim: int
    K: float
    affine_point: tuple[Fraction, ...]
    tangent_basis: tuple[IntVec, ...]
    vertices: tuple[IntVec, ...] = ()
    param_vertices: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.tangent_basis)

    @property
    def bounded(self) -> bool:
        return bool(self.vertices)

    def point(self, s: Sequence) -> tuple[Fraction, ...]:
        return tuple(
            p + sum(Fraction(sj) * t[i] for sj, t in zip(s, self.tangent_basis))
            for i, p in enumerate(self.affine_point)
        )

    @property
    def label(self) -> str:
        if self.vertices:
            if self.codim == len(self.affine_point):
                return f"vertex {_fmt_pt(self.vertices[0])}"
            kind = "edge" if self.dim == 1 else ("facet" if self.codim == 1 else f"{self.dim}-face")
            return f"{kind} {{{','.join(map(str, self.active))}}} " + "-".join(_fmt_pt(v) for v in self.vertices)
        return "face{" + ",".join(map(str, self.active)) + "}"


def _fmt_pt(p: Sequence) -> str:
    return "(" + ",".join(str(x) for x in p) + ")"


def _parallelotope_volume(vectors: Sequence[Sequence[int]]) -> float:
    if not vectors:
        return 1.0
    G = [[dot(a, b) for b in vectors] for a in vectors]
    return math.sqrt(float(det(G)))


@dataclass(frozen=True)
class RegularWedge:
    """``{x : <u_i, x> <= c_i, i = 1..n}`` with ``det U = +-1``.

    ``dual[j]`` is ``v_j`` with ``<u_i, v_j> = delta_ij``; local coordinates are
    ``y_i = <u_i, x> - c_i`` so that ``x = vertex + sum_j y_j v_j``.
    """

    normals: tuple[IntVec, ...]
    offsets: tuple[int, ...]
    dual: tuple[IntVec, ...]
    vertex: IntVec

    @property
    def n(self) -> int:
        return len(self.normals)

    def contains(self, x: Sequence) -> bool:
        return all(dot(u, x) <= c for u, c in zip(self.normals, self.offsets))

    def to_local(self, x: np.ndarray) -> np.ndarray:
        U = np.array(self.normals, dtype=float)
        return np.asarray(x, dtype=float) @ U.T - np.array(self.offsets, dtype=float)

    def from_local(self, y: np.ndarray) -> np.ndarray:
        V = np.array(self.dual, dtype=float)  # rows are v_j
        return np.asarray(y, dtype=float) @ V + np.array(self.vertex, dtype=float)

    def face(self, active: Iterable[int]) -> Face:
        active = tuple(sorted(set(active)))
        free = [j for j in range(self.n) if j not in active]
        basis = tuple(self.dual[j] for j in free)
        return Face(
            owner=self,
            active=active,
            codim=len(active),
            K=1.0 / _parallelotope_volume(basis),
            affine_point=tuple(Fraction(x) for x in self.vertex),
            tangent_basis=basis,
        )

    def faces(self) -> list[Face]:
        return [self.face(I) for m in range(self.n + 1) for I in itertools.combinations(range(self.n), m)]

    def transformed(self, A: Sequence[Sequence[int]], t: Sequence[int]) -> "RegularWedge":
        """Image under the unimodular affine map ``x -> A x + t``."""
        normals, offsets = _transform_facets(self.normals, self.offsets, A, t)
        return build_wedge(normals, offsets)


def _transform_facets(normals, offsets, A, t):
    Ainv = inverse(A)
    if any(x.denominator != 1 for row in Ainv for x in row):
        raise NotRegular(f"map matrix {A} is not unimodular")
    AinvT = [[int(Ainv[j][i]) for j in range(len(A))] for i in range(len(A))]
    new_normals = [tuple(dot(row, u) for row in AinvT) for u in normals]
    new_offsets = [c + dot(u2, t) for u2, c in zip(new_normals, offsets)]
    return new_normals, new_offsets


def build_wedge(normals: Sequence[Sequence[int]], offsets: Sequence[int]) -> RegularWedge:
    normals = tuple(_as_int_vec(u, "wedge normal") for u in normals)
    offsets = tuple(int(Fraction(c)) if Fraction(c).denominator == 1 else _bad_offset(c) for c in offsets)
    n = len(normals)
    if n == 0 or any(len(u) != n for u in normals) or len(offsets) != n:
        raise GeometryError("a wedge in R^n needs n normals of length n and n offsets")
    for i, u in enumerate(normals):
        if not is_primitive(u):
            raise NotPrimitive(f"normal u_{i} = {u} is not primitive (gcd {vgcd(u)})")
    d = det(normals)
    if abs(d) != 1:
        raise NotRegular(f"normals {normals} have determinant {d}, not +-1")
    Uinv = inverse(normals)  # columns are the dual vectors
    dual = tuple(tuple(int(Uinv[i][j]) for i in range(n)) for j in range(n))
    vertex = tuple(int(x) for x in solve(normals, offsets))
    return RegularWedge(normals, offsets, dual, vertex)


def _bad_offset(c):
    raise GeometryError(f"offset {c} is not an integer")


def k_alpha(wedge: RegularWedge, alpha: Sequence[int]) -> float:
    """Inverse volume of the parallelotope spanned by ``{v_i : alpha_i == 0}``."""
    alpha = tuple(getattr(alpha, "alpha", alpha))
    if len(alpha) != wedge.n:
        raise ValueError(f"multi-index of length {len(alpha)} for a wedge in R^{wedge.n}")
    return 1.0 / _parallelotope_volume([wedge.dual[i] for i, a in enumerate(alpha) if a == 0])


# ---------------------------------------------------------------------------
# Delzant polytopes


@dataclass(frozen=True, eq=False)
class DelzantPolytope:
    """A simple, regular lattice polytope, validated at construction."""

    n: int
    normals: tuple[IntVec, ...]
    offsets: tuple[int, ...]
    vertices: tuple[IntVec, ...]
    incidence: tuple[frozenset[int], ...]

    @property
    def num_facets(self) -> int:
        return len(self.normals)

    def contains(self, x: Sequence) -> bool:
        return all(dot(u, x) <= c for u, c in zip(self.normals, self.offsets))

    def slacks(self, x: np.ndarray) -> np.ndarray:
        """``c_j - <u_j, x>`` for every facet (last axis indexes facets)."""
        U = np.array(self.normals, dtype=float)
        return np.array(self.offsets, dtype=float) - np.asarray(x, dtype=float) @ U.T

    def bounding_box(self) -> tuple[IntVec, IntVec]:
        lo = tuple(min(v[i] for v in self.vertices) for i in range(self.n))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(self.n))
        return lo, hi

    @property
    def centroid(self) -> tuple[Fraction, ...]:
        """Average of the vertices."""
        m = len(self.vertices)
        return tuple(Fraction(sum(v[i] for v in self.vertices), m) for i in range(self.n))

    def vertex_index(self, v: Sequence[int]) -> int:
        return self.vertices.index(tuple(v))

    def vertex_wedge(self, i: int) -> RegularWedge:
        I = sorted(self.incidence[i])
        return build_wedge([self.normals[j] for j in I], [self.offsets[j] for j in I])

    def wedge_facets(self, i: int) -> list[int]:
        """Polytope facet index for each wedge facet of ``vertex_wedge(i)``."""
        return sorted(self.incidence[i])

    @cached_property
    def faces(self) -> dict[int, tuple[Face, ...]]:
        """Faces grouped by codimension ``m = 0..n``."""
        out: dict[int, tuple[Face, ...]] = {}
        for m in range(self.n + 1):
            seen: dict[tuple[int, ...], list[int]] = {}
            for vi, inc in enumerate(self.incidence):
                for I in itertools.combinations(sorted(inc), m):
                    seen.setdefault(I, []).append(vi)
            out[m] = tuple(self._make_face(I, vis) for I, vis in sorted(seen.items()))
        return out

    def face(self, active: Iterable[int]) -> Face:
        active = tuple(sorted(active))
        for f in self.faces[len(active)]:
            if f.active == active:
                return f
        raise KeyError(f"no face with active facets {active}")

    def _make_face(self, I: tuple[int, ...], vis: list[int]) -> Face:
        base = vis[0]
        inc = sorted(self.incidence[base])
        W = self.vertex_wedge(base)
        # edges leaving the base vertex inside the face: -v_j for wedge facets j not in I
        basis = tuple(tuple(-x for x in W.dual[k]) for k, j in enumerate(inc) if j not in I)
        p0 = self.vertices[base]
        pverts = []
        if basis:
            B = [[Fraction(b[i]) for b in basis] for i in range(self.n)]
            # least-squares-free exact solve on a nonsingular square subsystem
            rows = _independent_rows(B)
            Bs = [B[r] for r in rows]
            for vi in vis:
                rhs = [Fraction(self.vertices[vi][r] - p0[r]) for r in rows]
                pverts.append(tuple(solve(Bs, rhs)))
        else:
            pverts.append(())
        return Face(
            owner=self,
            active=I,
            codim=len(I),
            K=1.0 / _parallelotope_volume(basis),
            affine_point=tuple(Fraction(x) for x in p0),
            tangent_basis=basis,
            vertices=tuple(self.vertices[vi] for vi in vis),
            param_vertices=tuple(pverts),
        )

    def transformed(self, A: Sequence[Sequence[int]], t: Sequence[int]) -> "DelzantPolytope":
        normals, offsets = _transform_facets(self.normals, self.offsets, A, t)
        return build_polytope(facets=list(zip(normals, offsets)))

    # polygon helpers ------------------------------------------------------

    @cached_property
    def ccw_order(self) -> tuple[int, ...]:
        """Vertex indices in counterclockwise order (polygons only)."""
        self._require_polygon()
        cx, cy = (float(c) for c in self.centroid)
        return tuple(sorted(range(len(self.vertices)),
                            key=lambda i: math.atan2(self.vertices[i][1] - cy, self.vertices[i][0] - cx)))

    def edge_vertices(self, e: int) -> tuple[int, int]:
        vis = [i for i, inc in enumerate(self.incidence) if e in inc]
        return vis[0], vis[1]

    def _require_polygon(self):
        if self.n != 2:
            raise GeometryError(f"operation defined for polygons only (dimension {self.n})")

    def __repr__(self) -> str:
        return f"DelzantPolytope(n={self.n}, vertices={self.vertices})"


def _independent_rows(B: list[list[Fraction]]) -> list[int]:
    k = len(B[0])
    for rows in itertools.combinations(range(len(B)), k):
        if det([B[r] for r in rows]) != 0:
            return list(rows)
    raise GeometryError("degenerate face basis")


def build_polytope(facets: Sequence | None = None, vertices: Sequence | None = None) -> DelzantPolytope:
    """Validate and build a Delzant polytope from ``(u, c)`` facets or from vertices."""
    if (facets is None) == (vertices is None):
        raise GeometryError("give exactly one of facets or vertices")
    if vertices is not None:
        facets = _hull_facets([_as_int_vec(v, "vertex") for v in vertices])
        poly = build_polytope(facets=facets)
        given = {tuple(v) for v in vertices}
        if given != set(poly.vertices):
            extra = sorted(given - set(poly.vertices))
            raise GeometryError(f"points {extra} are not vertices of their convex hull")
        return poly

    normals = [_as_int_vec(u, "facet normal") for u, _ in facets]
    offsets = [int(Fraction(c)) if Fraction(c).denominator == 1 else _bad_offset(c) for _, c in facets]
    if not normals:
        raise Unbounded("no facets given")
    n = len(normals[0])
    if n not in (1, 2, 3):
        raise GeometryError(f"dimension {n} not supported (1, 2 or 3)")
    for k, u in enumerate(normals):
        if len(u) != n:
            raise GeometryError(f"facet {k} has {len(u)} coordinates, expected {n}")
        if not is_primitive(u):
            raise NotPrimitive(f"facet {k} normal {u} is not primitive")
    if len(set(zip(normals, offsets))) != len(normals):
        raise GeometryError("duplicate facet inequality")

    found: dict[tuple[Fraction, ...], frozenset[int]] = {}
    for S in itertools.combinations(range(len(normals)), n):
        M = [normals[j] for j in S]
        if det(M) == 0:
            continue
        x = tuple(solve(M, [offsets[j] for j in S]))
        if x in found:
            continue
        slack = [offsets[j] - dot(normals[j], x) for j in range(len(normals))]
        if any(s < 0 for s in slack):
            continue
        found[x] = frozenset(j for j, s in enumerate(slack) if s == 0)
    if not found:
        raise Unbounded("the inequalities define no vertex (unbounded or empty region)")

    verts, incid = [], []
    for x, inc in sorted(found.items()):
        if len(inc) != n:
            raise NotSimple(f"vertex {_fmt_pt(x)} lies on {len(inc)} facets {sorted(inc)}, expected {n}")
        if any(c.denominator != 1 for c in x):
            raise NonIntegerVertex(f"vertex {_fmt_pt(x)} is not a lattice point")
        verts.append(tuple(int(c) for c in x))
        incid.append(inc)

    for x, inc in zip(verts, incid):
        I = sorted(inc)
        d = det([normals[j] for j in I])
        if abs(d) != 1:
            raise NotRegular(f"at vertex {_fmt_pt(x)} the facet normals {[normals[j] for j in I]} have determinant {d}")
        Uinv = inverse([normals[j] for j in I])
        for k in range(n):
            edge = [-Uinv[i][k] for i in range(n)]
            if all(dot(normals[j], edge) <= 0 for j in range(len(normals)) if j not in inc):
                raise Unbounded(f"the edge leaving vertex {_fmt_pt(x)} in direction {tuple(map(int, edge))} is a ray")
    used = set().union(*incid)
    for j in range(len(normals)):
        if j not in used:
            raise GeometryError(f"facet {j} ({normals[j]}, {offsets[j]}) is redundant")
    return DelzantPolytope(n, tuple(normals), tuple(offsets), tuple(verts), tuple(incid))


def _hull_facets(points: list[IntVec]) -> list[tuple[IntVec, int]]:
    if not points:
        raise GeometryError("no vertices given")
    n = len(points[0])
    if n == 1:
        xs = [p[0] for p in points]
        if min(xs) == max(xs):
            raise GeometryError("degenerate interval")
        return [((-1,), -min(xs)), ((1,), max(xs))]
    if n not in (2, 3):
        raise GeometryError(f"dimension {n} not supported (1, 2 or 3)")
    facets = set()
    for tup in itertools.combinations(points, n):
        diffs = [tuple(a - b for a, b in zip(p, tup[0])) for p in tup[1:]]
        if n == 2:
            normal = (diffs[0][1], -diffs[0][0])
        else:
            a, b = diffs
            normal = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        if not any(normal):
            continue
        normal = primitive(normal)
        c = dot(normal, tup[0])
        vals = [dot(normal, p) - c for p in points]
        if all(v <= 0 for v in vals):
            facets.add((normal, c))
        elif all(v >= 0 for v in vals):
            facets.add((tuple(-x for x in normal), -c))
    if len(facets) < n + 1:
        raise GeometryError("vertices do not span a full-dimensional polytope")
    return sorted(facets)


# ---------------------------------------------------------------------------
# polygon constants


@dataclass(frozen=True)
class PolygonVertexFrame:
    """Inward primitive edge directions at a polygon vertex.

    ``w1`` points to the previous vertex and ``w2`` to the next one in
    counterclockwise order; ``edge1``/``edge2`` are the facet indices of the
    edges along ``w1``/``w2``.
    """

    vertex: IntVec
    w1: IntVec
    w2: IntVec
    eta1: Fraction
    eta2: Fraction
    mu: Fraction
    edge1: int
    edge2: int


@dataclass(frozen=True)
class EdgeData:
    edge: int
    endpoints: tuple[IntVec, IntVec]
    v1: IntVec
    normal: IntVec
    zeta: Fraction
    completions: tuple[IntVec, ...]
    lattice_length: int


def _unimodular_completion(v1: IntVec) -> IntVec:
    g, x, y = ext_gcd(v1[0], v1[1])
    if g != 1:
        raise NotPrimitive(f"{v1} is not primitive")
    return (-y, x)  # det(v1, v2) = v1[0]*x + v1[1]*y = 1


def inward_completions(v1: IntVec, normal: IntVec, count: int = 2) -> list[IntVec]:
    """Lattice vectors ``v2`` with ``(v1, v2)`` unimodular and ``<v2, normal> < 0``.

    Ordered by ``|k|`` in ``v2 = v2_0 + k v1``, then lexicographically.
    """
    v20 = _unimodular_completion(v1)
    if dot(v20, normal) > 0:
        v20 = (-v20[0], -v20[1])
    if dot(v20, normal) == 0:
        raise GeometryError(f"{normal} is not normal to the edge direction {v1}")
    cands = []
    for k in range(-count, count + 1):
        cands.append((abs(k), (v20[0] + k * v1[0], v20[1] + k * v1[1])))
    return [v for _, v in sorted(cands)][:count]


def zeta_from(v2: Sequence[int], normal: Sequence[int]) -> Fraction:
    return Fraction(dot(v2, normal), dot(normal, normal))


def edge_data(poly: DelzantPolytope, e: int) -> EdgeData:
    poly._require_polygon()
    a, b = poly.edge_vertices(e)
    pa, pb = poly.vertices[a], poly.vertices[b]
    diff = (pb[0] - pa[0], pb[1] - pa[1])
    v1 = primitive(diff)
    normal = poly.normals[e]
    comps = inward_completions(v1, normal, 2)
    zetas = {zeta_from(v2, normal) for v2 in comps}
    if len(zetas) != 1:
        raise GeometryError(f"edge {e}: zeta depends on the completion {comps}")
    return EdgeData(e, (pa, pb), v1, normal, zetas.pop(), tuple(comps), vgcd(diff))


def edge_zeta(poly: DelzantPolytope, e: int) -> Fraction:
    return edge_data(poly, e).zeta


def vertex_frame(poly: DelzantPolytope, v: int | Sequence[int]) -> PolygonVertexFrame:
    poly._require_polygon()
    vi = v if isinstance(v, int) else poly.vertex_index(v)
    order = poly.ccw_order
    k = order.index(vi)
    prev, nxt = order[k - 1], order[(k + 1) % len(order)]
    p = poly.vertices[vi]
    w1 = primitive([poly.vertices[prev][i] - p[i] for i in range(2)])
    w2 = primitive([poly.vertices[nxt][i] - p[i] for i in range(2)])
    if abs(w1[0] * w2[1] - w1[1] * w2[0]) != 1:
        raise NotRegular(f"edge directions {w1}, {w2} at {p} are not a lattice basis")
    (edge1,) = poly.incidence[vi] & poly.incidence[prev]
    (edge2,) = poly.incidence[vi] & poly.incidence[nxt]
    g = dot(w1, w2)
    eta1 = Fraction(g, dot(w1, w1))
    eta2 = Fraction(g, dot(w2, w2))
    return PolygonVertexFrame(p, w1, w2, eta1, eta2, eta1 + eta2, edge1, edge2)


# ---------------------------------------------------------------------------
# text format


def parse_polytope(text: str) -> DelzantPolytope:
    """Parse the ``dim`` / ``facet`` / ``vertex`` line format."""
    dim = None
    facets, verts = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            nums = [int(tok) for tok in rest]
        except ValueError:
            raise PolytopeFormatError(f"expected integers, got {' '.join(rest)!r}", lineno) from None
        if head == "dim":
            if dim is not None or len(nums) != 1:
                raise PolytopeFormatError("malformed or repeated 'dim' line", lineno)
            dim = nums[0]
            if dim not in (1, 2, 3):
                raise PolytopeFormatError(f"dimension {dim} not supported", lineno)
            continue
        if dim is None:
            raise PolytopeFormatError("first line must be 'dim n'", lineno)
        if head == "facet":
            if len(nums) != dim + 1:
                raise PolytopeFormatError(f"facet needs {dim} normal coordinates and an offset", lineno)
            facets.append((tuple(nums[:dim]), nums[dim]))
        elif head == "vertex":
            if len(nums) != dim:
                raise PolytopeFormatError(f"vertex needs {dim} coordinates", lineno)
            verts.append(tuple(nums))
        else:
            raise PolytopeFormatError(f"unknown keyword {head!r}", lineno)
        if facets and verts:
            raise PolytopeFormatError("facet and vertex lines cannot be mixed", lineno)
    if dim is None:
        raise PolytopeFormatError("empty polytope file")
    if facets:
        return build_polytope(facets=facets)
    if verts:
        return build_polytope(vertices=verts)
    raise PolytopeFormatError("no facet or vertex lines")


def load_polytope(path: str | Path) -> DelzantPolytope:
    return parse_polytope(Path(path).read_text())


def format_polytope(poly: DelzantPolytope) -> str:
    lines = [f"dim {poly.n}"]
    for u, c in zip(poly.normals, poly.offsets):
        lines.append("facet " + " ".join(map(str, u)) + f" {c}")
    return "\n".join(lines) + "\n"


# common shapes


def unit_simplex(n: int) -> DelzantPolytope:
    facets = [(tuple(-int(i == j) for j in range(n)), 0) for i in range(n)]
    facets.append((tuple([1] * n), 1))
    return build_polytope(facets=facets)


def unit_cube(n: int) -> DelzantPolytope:
    facets = []
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        facets.append((tuple(-x for x in e), 0))
        facets.append((e, 1))
    return build_polytope(facets=facets)


def random_unimodular(n: int, rng: np.random.Generator, steps: int = 6, max_entry: int = 2) -> list[list[int]]:
    """Random integer matrix with determinant +-1: a product of elementary shears and sign flips."""
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 1:
        return [[int(rng.choice((-1, 1)))]]
    for _ in range(steps):
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        k = int(rng.integers(-max_entry, max_entry + 1))
        A[i] = [a + k * b for a, b in zip(A[i], A[j])]
        if rng.random() < 0.3:
            A[j] = [-b for b in A[j]]
    return A
