"""The twelve acceptance criteria, each at its stated tolerance.

Every test appends one ``PASS``/``FAIL`` line to the acceptance summary that
``conftest.py`` prints at the end of the run, then asserts.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from eulermac.analysis import convergence_report, lattice_count, riemann_sum
from eulermac.exact import bernoulli, b_coeff, todd_coefficients
from eulermac.expansion import gs_todd_oracle, polygon_expansion, polytope3_expansion, wedge_expansion
from eulermac.functions import AffinePullback, BumpCutoff, ExpressionFunction, finite_difference_check, function_from_source
from eulermac.geometry import (build_wedge, edge_data, inverse, load_polytope, random_unimodular, unit_simplex,
                               vertex_frame)
from eulermac.quadrature import QuadratureConfig, check_stokes_identity, integrate_face_star
from oracles import bernoulli_akiyama_tanigawa, random_delzant_polygon, random_expression, simplex_ehrhart

TRI = unit_simplex(2)
SQUARE = load_polytope("polytopes/square.txt")
HEXAGON = load_polytope("polytopes/hexagon.txt")
LOG2 = math.log(2)


def report(k: int, ok: bool, detail: str, started: float | None = None) -> None:
    took = f" [{time.perf_counter() - started:.2f} s]" if started is not None else ""
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}{took}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_triangle_linear_exact():
    t0 = time.perf_counter()
    f = function_from_source("x1", 2)
    T = polygon_expansion(TRI, f, 4).T
    coeffs_ok = T == [Fraction(1, 6), Fraction(1, 2), Fraction(1, 3), 0, 0] and all(isinstance(t, Fraction) for t in T)
    bad = [N for N in range(1, 101)
           if riemann_sum(TRI, f, N).value != Fraction(1, 6) + Fraction(1, 2 * N) + Fraction(1, 3 * N * N)]
    elapsed = time.perf_counter() - t0
    report(1, coeffs_ok and not bad and elapsed < 1.0,
           f"T = {[str(t) for t in T]}, closed form fails for N in {bad or 'none'}", t0)


def test_criterion_02_worked_example_constants():
    t0 = time.perf_counter()
    f = function_from_source("x1", 2)
    # edges: e1 = {x1 = 0} (facet 0), e2 = hypotenuse (facet 2), e3 = {x2 = 0} (facet 1)
    e1, e2, e3 = 0, 2, 1
    S = sum((Fraction(1, 4) + vertex_frame(TRI, i).mu / 12) * f.evaluate(v) for i, v in enumerate(TRI.vertices))
    T = sum(edge_data(TRI, e).zeta * integrate_face_star(TRI.face((e,)), f, dirs=[edge_data(TRI, e).normal], exact=True)
            for e in range(3)) / 12
    zetas = (edge_data(TRI, e1).zeta, edge_data(TRI, e2).zeta)
    mu = vertex_frame(TRI, TRI.vertex_index((1, 0))).mu
    edge_ints = tuple(integrate_face_star(TRI.face((e,)), f, exact=True) for e in (e1, e2, e3))
    ok = (S == Fraction(3, 8) and T == Fraction(1, 24) and zetas == (-1, Fraction(-1, 2)) and mu == Fraction(3, 2)
          and edge_ints == (0, Fraction(1, 2), Fraction(1, 2)) and time.perf_counter() - t0 < 1.0)
    report(2, ok, f"S = {S}, T = {T}, zeta(e1), zeta(e2) = {zetas[0]}, {zetas[1]}, mu(1,0) = {mu}, "
                  f"edge integrals {tuple(str(x) for x in edge_ints)}", t0)


def test_criterion_03_reciprocal_coefficients():
    t0 = time.perf_counter()
    T = polygon_expansion(TRI, ExpressionFunction("1/(1+x1+x2)", 2), 2).T
    errs = (abs(T[0] - (1 - LOG2)), abs(T[1] - (0.25 + LOG2)), abs(T[2] - 33 / 48))
    ok = max(errs) < 1e-10 and time.perf_counter() - t0 < 10
    report(3, ok, f"T = {T}, errors {', '.join(f'{e:.1e}' for e in errs)}", t0)


def test_criterion_04_reciprocal_convergence_order():
    t0 = time.perf_counter()
    rep = convergence_report(TRI, ExpressionFunction("1/(1+x1+x2)", 2), 2, [10, 25, 50, 75, 100, 250, 500, 1000])
    ok = -3.15 <= rep.slope <= -2.85 and time.perf_counter() - t0 < 30
    report(4, ok, f"slope {rep.slope:.4f} (95% CI {rep.slope_ci[0]:.4f}..{rep.slope_ci[1]:.4f}) over N = {rep.fit_N}", t0)


def test_criterion_05_todd_and_bernoulli():
    t0 = time.perf_counter()
    b = todd_coefficients(20).b
    # (sum_k b_k s^k / k!) * (1 - e^{-s}) / s = 1, with (1 - e^{-s}) / s = sum_j (-1)^j s^j / (j+1)!
    series = [sum(b[k] / math.factorial(k) * Fraction((-1) ** (m - k), math.factorial(m - k + 1)) for k in range(m + 1))
              for m in range(21)]
    identity = series == [1] + [0] * 20
    odd_zero = all(b_coeff(k) == 0 for k in range(3, 21, 2))
    Bs = [bernoulli(p) for p in (1, 2, 3)]
    oracle = [abs(bernoulli_akiyama_tanigawa(2 * p)) for p in (1, 2, 3)]
    ok = identity and odd_zero and Bs == [Fraction(1, 6), Fraction(1, 30), Fraction(1, 42)] == oracle
    report(5, ok and time.perf_counter() - t0 < 1, f"series identity {identity}, odd b vanish {odd_zero}, "
                                                  f"B_1..B_3 = {[str(x) for x in Bs]}", t0)


def _random_wedge_instance(rng, n):
    W = build_wedge(random_unimodular(n, rng, steps=3, max_entry=1), [int(c) for c in rng.integers(-2, 3, n)])
    a = rng.uniform(-1, 1, n)
    # the expression grammar takes plain decimals, not scientific notation
    src = " + ".join(f"({a[i]:.6f})*x{i + 1}" for i in range(n))
    f = ExpressionFunction(f"exp({src})", n) * BumpCutoff(np.array(W.vertex, dtype=float) + rng.uniform(-0.3, 0.3, n),
                                                          0.5, 1.5)
    return W, f


def test_criterion_06_stokes_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    cfg3 = QuadratureConfig(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=14)
    for n, count, cfg in ((2, 10, QuadratureConfig()), (3, 5, cfg3)):
        for _ in range(count):
            W, f = _random_wedge_instance(rng, n)
            m = int(rng.integers(0, n))
            active = tuple(sorted(rng.choice(n, size=m, replace=False).tolist()))
            j = int(rng.choice([i for i in range(n) if i not in active]))
            lhs, rhs = check_stokes_identity(W.face(active), j, f, cfg)
            worst = max(worst, abs(lhs - rhs))
    ok = worst < 1e-8 and time.perf_counter() - t0 < 60
    report(6, ok, f"10 planar + 5 spatial wedge instances, worst |lhs - rhs| = {worst:.1e}", t0)


def _matched_constants(P, A, t):
    """zeta per edge and mu per vertex of ``P`` and of its image, paired by the map."""
    image = P.transformed(A, t)
    phi = lambda v: tuple(sum(A[i][k] * v[k] for k in range(2)) + t[i] for i in range(2))
    pairs_mu = [(vertex_frame(P, i).mu, vertex_frame(image, image.vertex_index(phi(v))).mu)
                for i, v in enumerate(P.vertices)]
    img_edges = {frozenset(edge_data(image, e).endpoints): e for e in range(image.num_facets)}
    pairs_zeta = [(edge_data(P, e).zeta,
                   edge_data(image, img_edges[frozenset(phi(p) for p in edge_data(P, e).endpoints)]).zeta)
                  for e in range(P.num_facets)]
    return pairs_zeta, pairs_mu


def test_criterion_07_unimodular_invariance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    W = build_wedge([(1, 0), (0, 1)], [0, 0])
    f = ExpressionFunction("exp(x1/2 - x2/3)", 2) * BumpCutoff([-0.5, -0.5], 1.0, 2.0)
    base = np.array(wedge_expansion(W, f, 3).T)
    worst = 0.0
    zeta_changed = mu_changed = 0
    for k in range(10):
        A = random_unimodular(2, rng)
        t = [int(c) for c in rng.integers(-3, 4, 2)]
        Ainv = np.array(inverse(A), dtype=float)
        g = AffinePullback(f, Ainv, -Ainv @ np.array(t, dtype=float))
        worst = max(worst, float(np.max(np.abs(np.array(wedge_expansion(W.transformed(A, t), g, 3).T) - base))))
        pz, pm = _matched_constants((TRI, SQUARE, HEXAGON)[k % 3], A, t)
        zeta_changed += sum(a != b for a, b in pz)
        mu_changed += sum(a != b for a, b in pm)
    ok = worst < 1e-9 and zeta_changed == 0 and mu_changed == 0
    # zeta = -1/|n|^2 and mu depend on Euclidean lengths, which unimodular maps do not preserve
    report(7, ok, f"wedge T_q max deviation {worst:.1e}; polygon constants changed: "
                  f"{zeta_changed} edge zetas, {mu_changed} vertex mus", t0)


def test_criterion_08_pick_invariant():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    bad_pick = bad_count = 0
    one = function_from_source("1", 2)
    for _ in range(20):
        P = random_delzant_polygon(rng)
        pick = sum(Fraction(1, 4) + vertex_frame(P, i).mu / 12 for i in range(len(P.vertices)))
        bad_pick += pick != 1
        res = polygon_expansion(P, one, 2)
        bad_count += sum(res.partial_sum(N) * N * N != lattice_count(P, N) for N in range(1, 21))
    report(8, bad_pick == 0 and bad_count == 0,
           f"20 random polygons: {bad_pick} Pick sums != 1, {bad_count} lattice-count mismatches for N = 1..20", t0)


def test_criterion_09_polynomial_exactness():
    t0 = time.perf_counter()
    mismatches = []
    for name, P in (("triangle", TRI), ("square", SQUARE)):
        for src in ("1", "x1", "x1*x2", "x1^2 + x2^2"):
            f = function_from_source(src, 2)
            res = polygon_expansion(P, f, 6)
            bad = [N for N in range(1, 51) if res.partial_sum(N) != riemann_sum(P, f, N).value]
            if bad or not res.exact:
                mismatches.append((name, src, bad))
    report(9, not mismatches, f"8 polygon/polynomial pairs, N = 1..50, mismatches: {mismatches or 'none'}", t0)


def test_criterion_10_todd_operator_oracle():
    t0 = time.perf_counter()
    cases = [
        (build_wedge([(1,)], [0]), ExpressionFunction("exp(x1)", 1) * BumpCutoff([0.0], 35.0, 40.0)),
        (build_wedge([(1, 0), (0, 1)], [0, 0]),
         ExpressionFunction("exp(x1/2 + x2/3)*cos(x1 - x2)", 2) * BumpCutoff([-0.5, -0.5], 1.0, 2.5)),
    ]
    worst = 0.0
    for W, f in cases:
        a = wedge_expansion(W, f, 3).T
        b = gs_todd_oracle(W, f, 3).T
        worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    report(10, worst < 1e-6, f"standard 1-D and 2-D wedges, q <= 3, worst difference {worst:.1e}", t0)


@pytest.mark.slow
def test_criterion_11_three_dimensional_path():
    t0 = time.perf_counter()
    simplex = load_polytope("polytopes/simplex3.txt")
    ones = polytope3_expansion(simplex, function_from_source("1", 3), 3).T
    # binomial(N+3, 3) / N^3 = 1/6 + 1/N + 11/(6 N^2) + 1/N^3
    ehrhart = (1 / 6, 1.0, 11 / 6, 1.0)
    err_ones = max(abs(a - b) for a, b in zip(ones, ehrhart))
    assert [simplex_ehrhart(3, N) for N in (1, 2)] == [4, 10]

    f = ExpressionFunction("exp(x1/2 + x2/3 - x3/4)", 3)
    a = polytope3_expansion(simplex, f, 2)
    b = polytope3_expansion(simplex, f, 2, delta=0.2, profile="exp2")
    err_partition = max(abs(x - y) for x, y in zip(a.T, b.T))
    rep = convergence_report(simplex, f, 2, [8, 12, 16, 24, 32, 48, 64], expansion=a)
    ok = err_ones < 1e-5 and err_partition < 1e-5 and rep.slope <= -2.85 and time.perf_counter() - t0 < 300
    report(11, ok, f"f = 1 max error {err_ones:.1e}; two partitions differ by {err_partition:.1e}; "
                   f"Q = 2 remainder slope {rep.slope:.3f} over N = {rep.fit_N}", t0)


def test_criterion_12_jets_against_finite_differences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(12)
    worst, where = 0.0, None
    for _ in range(20):
        src = random_expression(rng)
        f = ExpressionFunction(src, 2)
        for order in range(1, 5):
            x = rng.uniform(-0.8, 0.8, 2)
            dirs = [rng.uniform(-1, 1, 2) for _ in range(order)]
            jet = float(f.dirderiv(x, dirs))
            fd = finite_difference_check(f, x, dirs)
            rel = abs(jet - fd) / max(abs(jet), 1.0)
            if rel > worst:
                worst, where = rel, (src, order)
    report(12, worst < 1e-6, f"20 expressions, orders 1..4, worst relative error {worst:.1e} "
                             f"(order {where[1]})", t0)
