import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulermac.geometry import (GeometryError, NonIntegerVertex, NotPrimitive, NotRegular, NotSimple,
                               PolytopeFormatError, Unbounded, build_polytope, build_wedge, dot, edge_data,
                               edge_zeta, format_polytope, inward_completions, k_alpha, parse_polytope,
                               random_unimodular, unit_cube, unit_simplex, vertex_frame, zeta_from)

TRIANGLE = unit_simplex(2)


def edge_index(poly, a, b):
    for e in range(poly.num_facets):
        if set(edge_data(poly, e).endpoints) == {a, b}:
            return e
    raise KeyError((a, b))


# wedges ----------------------------------------------------------------------

def test_standard_wedge_dual_basis():
    W = build_wedge([(1, 0), (0, 1)], [0, 0])
    assert W.dual == ((1, 0), (0, 1)) and W.vertex == (0, 0)


def test_skew_wedge_dual_basis():
    W = build_wedge([(0, 1), (1, -1)], [0, 0])
    assert W.dual == ((1, 1), (1, 0))


def test_nonprimitive_normal_rejected():
    with pytest.raises(NotPrimitive):
        build_wedge([(2, 0), (0, 1)], [0, 0])


def test_irregular_wedge_rejected():
    with pytest.raises(NotRegular):
        build_wedge([(1, 1), (1, -1)], [0, 0])


def test_k_alpha_values():
    W = build_wedge([(1, 0), (0, 1)], [0, 0])
    assert all(k_alpha(W, a) == 1 for a in [(0, 0), (1, 0), (0, 3), (2, 2)])
    skew = build_wedge([(0, 1), (1, -1)], [0, 0])
    assert k_alpha(skew, (0, 1)) == pytest.approx(1 / math.sqrt(2))
    assert k_alpha(skew, (1, 1)) == 1


def test_k_alpha_three_dim():
    W = build_wedge([(1, 0, 0), (1, 1, 0), (0, 0, 1)], [0, 0, 0])
    v1, v3 = W.dual[0], W.dual[2]
    cross = np.cross(v1, v3)
    assert k_alpha(W, (0, 1, 0)) == pytest.approx(1 / np.linalg.norm(cross))


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_dual_basis_property(seed, n):
    rng = np.random.default_rng(seed)
    U = random_unimodular(n, rng)
    c = [int(x) for x in rng.integers(-3, 4, size=n)]
    W = build_wedge(U, c)
    assert all(dot(W.normals[i], W.dual[j]) == int(i == j) for i in range(n) for j in range(n))
    assert all(dot(u, W.vertex) == ci for u, ci in zip(W.normals, W.offsets))


def test_wedge_transform_moves_vertex():
    W = build_wedge([(1, 0), (0, 1)], [0, 0])
    V = W.transformed([[1, 1], [0, 1]], [2, -1])
    assert V.vertex == (2, -1)
    assert V.contains((1, -2)) and not V.contains((3, -1))


# polytopes -------------------------------------------------------------------

def test_triangle_structure():
    assert set(TRIANGLE.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert len(TRIANGLE.faces[1]) == 3


def test_square_all_mu_zero():
    sq = unit_cube(2)
    assert len(sq.vertices) == 4 and len(sq.faces[1]) == 4
    assert all(vertex_frame(sq, i).mu == 0 for i in range(4))


def test_three_simplex_face_counts():
    S = unit_simplex(3)
    assert len(S.vertices) == 4 and len(S.faces[2]) == 6 and len(S.faces[1]) == 4


def test_cube_faces_are_simple():
    C = unit_cube(3)
    for m, faces in C.faces.items():
        for f in faces:
            assert f.codim == m == len(f.active)
            assert len(f.vertices) == 2 ** (3 - m)


def test_from_vertices_matches_facets():
    P = build_polytope(vertices=[(0, 0), (1, 0), (0, 1)])
    assert set(P.vertices) == set(TRIANGLE.vertices)
    assert sorted(zip(P.normals, P.offsets)) == sorted(zip(TRIANGLE.normals, TRIANGLE.offsets))


def test_interior_point_in_vertex_list_rejected():
    with pytest.raises(GeometryError):
        build_polytope(vertices=[(0, 0), (2, 0), (0, 2), (0, 1)])


def test_not_simple_octahedron():
    facets = [((a, b, c), 1) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)]
    with pytest.raises(NotSimple):
        build_polytope(facets=facets)


def test_not_regular_triangle():
    with pytest.raises(NotRegular):
        build_polytope(vertices=[(0, 0), (2, 1), (1, 2)])


def test_non_integer_vertex():
    with pytest.raises(NonIntegerVertex):
        build_polytope(facets=[((-1, 0), 0), ((0, -1), 0), ((2, 1), 1)])


def test_unbounded():
    with pytest.raises(Unbounded):
        build_polytope(facets=[((-1, 0), 0), ((0, -1), 0)])
    with pytest.raises(Unbounded):
        build_polytope(facets=[((-1, 0), 0), ((0, -1), 0), ((1, -1), 1)])


def test_error_names_violating_vertex():
    with pytest.raises(NotRegular, match=r"\(2,1\)|\(1,2\)|\(0,0\)"):
        build_polytope(vertices=[(0, 0), (2, 1), (1, 2)])


# polygon constants ------------------------------------------------------------

def test_triangle_zetas():
    assert edge_zeta(TRIANGLE, edge_index(TRIANGLE, (0, 0), (0, 1))) == -1
    assert edge_zeta(TRIANGLE, edge_index(TRIANGLE, (1, 0), (0, 1))) == Fraction(-1, 2)
    assert edge_zeta(TRIANGLE, edge_index(TRIANGLE, (0, 0), (1, 0))) == -1


def test_triangle_vertex_frames():
    fr = vertex_frame(TRIANGLE, (1, 0))
    assert {fr.w1, fr.w2} == {(-1, 0), (-1, 1)}
    assert fr.mu == Fraction(3, 2)
    assert vertex_frame(TRIANGLE, (0, 0)).mu == 0


def test_zeta_independent_of_completion():
    hexagon = build_polytope(vertices=[(0, 0), (2, 0), (3, 1), (3, 2), (1, 2), (0, 1)])
    for e in range(hexagon.num_facets):
        ed = edge_data(hexagon, e)
        comps = inward_completions(ed.v1, ed.normal, 3)
        flipped = inward_completions(tuple(-x for x in ed.v1), ed.normal, 3)
        assert len({zeta_from(v, ed.normal) for v in comps + flipped}) == 1
        for v in comps + flipped:
            assert abs(ed.v1[0] * v[1] - ed.v1[1] * v[0]) == 1
            assert dot(v, ed.normal) < 0


@given(st.integers(0, 10_000))
def test_vertex_frames_unimodular_and_pick(seed):
    rng = np.random.default_rng(seed)
    P = TRIANGLE.transformed(random_unimodular(2, rng), [int(x) for x in rng.integers(-3, 4, 2)])
    frames = [vertex_frame(P, i) for i in range(len(P.vertices))]
    assert all(abs(f.w1[0] * f.w2[1] - f.w1[1] * f.w2[0]) == 1 for f in frames)
    assert sum(Fraction(1, 4) + f.mu / 12 for f in frames) == 1


# text format -----------------------------------------------------------------

def test_parse_round_trip():
    text = "dim 2\n# a comment\nfacet -1 0 0\n\nfacet 0 -1 0  # trailing\nfacet 1 1 1\n"
    P = parse_polytope(text)
    Q = parse_polytope(format_polytope(P))
    assert P.vertices == Q.vertices


@pytest.mark.parametrize("text,line", [
    ("dim 2\nfacet 1 x 0\n", 2),
    ("dim 2\nfacet 1 0\n", 2),
    ("dim 2\nvertex 0 0\nfacet 1 0 1\n", 3),
    ("facet 1 0 1\n", 1),
    ("dim 2\nedge 1 2\n", 2),
])
def test_parse_errors_name_line(text, line):
    with pytest.raises(PolytopeFormatError) as exc:
        parse_polytope(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)
