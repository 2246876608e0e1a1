"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 resource budget exceeded,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import DEFAULT_BUDGET, TooManyPoints, convergence_report, riemann_sum
from .expansion import PartitionFailure, THREE_D_CONFIG, expand
from .expressions import ParseError
from .functions import function_from_source
from .geometry import (GeometryError, edge_data, load_polytope, random_unimodular, vertex_frame)
from .jets import DomainError
from .quadrature import QuadratureConfig, ToleranceNotReached

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_NUMERIC = 0, 2, 3, 4


@dataclass
class RunSpec:
    command: str
    polytope: str
    function: str | None = None
    Q: int | None = None
    N: list[int] = field(default_factory=list)
    abs_tol: float | None = None
    rel_tol: float | None = None
    delta: float | None = None
    threads: int = 1
    seed: int | None = None
    output: str | None = None
    format: str = "table"

    def validate(self) -> None:
        if self.Q is not None and self.Q < 0:
            raise ValueError(f"--Q must be non-negative, got {self.Q}")
        if any(n < 1 for n in self.N):
            raise ValueError("N values must be >= 1")
        if self.threads < 1:
            raise ValueError("--threads must be >= 1")
        for name in ("abs_tol", "rel_tol", "delta"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")

    def header(self) -> str:
        return "\n".join(f"# {k}: {v}" for k, v in asdict(self).items())


def fmt(v) -> str:
    """Exact values as ``p/q``; floats as the shortest round-trip decimal."""
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)


def _config(spec: RunSpec, n: int) -> QuadratureConfig:
    base = THREE_D_CONFIG if n == 3 else QuadratureConfig()
    kw = {}
    if spec.abs_tol is not None:
        kw["abs_tol"] = spec.abs_tol
    if spec.rel_tol is not None:
        kw["rel_tol"] = spec.rel_tol
    return QuadratureConfig(**{**asdict(base), **kw})


def cmd_sum(spec: RunSpec, args) -> int:
    poly = load_polytope(spec.polytope)
    f = function_from_source(spec.function, poly.n)
    rows = []
    for N in spec.N:
        rs = riemann_sum(poly, f, N, threads=spec.threads, budget=args.budget)
        rows.append([str(N), str(rs.count), fmt(rs.value)])
    print(_table(["N", "count", "S_N"], rows))
    return EXIT_OK


def cmd_expand(spec: RunSpec, args) -> int:
    poly = load_polytope(spec.polytope)
    f = function_from_source(spec.function, poly.n)
    res = expand(poly, f, spec.Q, _config(spec, poly.n), delta=spec.delta)
    print(f"# method: {res.method}  exact: {res.exact}")
    print(_table(["q", "T_q"], [[str(q), fmt(t)] for q, t in enumerate(res.T)]))
    print()
    header = ["face"] + [f"T_{q}" for q in range(res.Q + 1)]
    rows = [[k] + [fmt(v) for v in vals] for k, vals in res.breakdown.items()]
    print(_table(header, rows))
    if spec.output:
        import csv
        with open(spec.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerow(["total"] + [fmt(t) for t in res.T])
            w.writerows(rows)
    return EXIT_OK


def cmd_converge(spec: RunSpec, args) -> int:
    poly = load_polytope(spec.polytope)
    f = function_from_source(spec.function, poly.n)
    cfg = _config(spec, poly.n)
    res = expand(poly, f, spec.Q, cfg, delta=spec.delta)
    rep = convergence_report(poly, f, spec.Q, spec.N, expansion=res, threads=spec.threads,
                             exclude_smallest=not args.include_smallest)
    rep.meta = {k: v for k, v in asdict(spec).items()}
    rows = [[str(r.N), fmt(r.S), fmt(r.P), fmt(r.R), repr(r.log10N), repr(r.log10R)] for r in rep.rows]
    print(_table(["N", "S_N", "P_N", "R_N", "log10N", "log10R"], rows))
    if rep.slope is None:
        print("# slope: undefined (fewer than two nonzero remainders)")
    else:
        lo, hi = rep.slope_ci
        print(f"# slope: {rep.slope!r}  ci95: [{lo!r}, {hi!r}]  fit N: {' '.join(map(str, rep.fit_N))}")
    if spec.output:
        rep.to_csv(spec.output)
    return EXIT_OK


def cmd_validate(spec: RunSpec, args) -> int:
    poly = load_polytope(spec.polytope)
    print(f"Delzant polytope, dimension {poly.n}: {len(poly.vertices)} vertices, {poly.num_facets} facets")
    for m in range(1, poly.n):
        print(f"  faces of codimension {m}: {len(poly.faces[m])}")
    if poly.n == 2:
        print(_table(["edge", "zeta", "lattice length"],
                     [[edge_data(poly, e).endpoints.__repr__(), fmt(edge_data(poly, e).zeta),
                       str(edge_data(poly, e).lattice_length)] for e in range(poly.num_facets)]))
        frames = [vertex_frame(poly, i) for i in range(len(poly.vertices))]
        print(_table(["vertex", "w1", "w2", "mu"], [[str(fr.vertex), str(fr.w1), str(fr.w2), fmt(fr.mu)] for fr in frames]))
        print(f"sum_v (1/4 + mu/12) = {fmt(sum(Fraction(1, 4) + fr.mu / 12 for fr in frames))}")
    if spec.seed is not None:
        rng = np.random.default_rng(spec.seed)
        A = random_unimodular(poly.n, rng)
        t = [int(x) for x in rng.integers(-3, 4, size=poly.n)]
        image = poly.transformed(A, t)
        print(f"unimodular image under A={A}, t={t}: valid, vertices {image.vertices}")
    return EXIT_OK


COMMANDS = {"sum": cmd_sum, "expand": cmd_expand, "converge": cmd_converge, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eulermac", description="Euler-MacLaurin expansions of lattice Riemann sums.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_f=True):
        sp.add_argument("polytope", help="polytope file (dim/facet/vertex lines)")
        if needs_f:
            sp.add_argument("--f", required=True, help="function of x1..xn, e.g. '1/(1+x1+x2)'")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None)

    def tolerances(sp):
        sp.add_argument("--abs-tol", type=float, default=None)
        sp.add_argument("--rel-tol", type=float, default=None)
        sp.add_argument("--delta", type=float, default=None, help="partition-of-unity margin (3-D only)")

    s = sub.add_parser("sum", help="brute-force Riemann sum")
    common(s)
    s.add_argument("--N", type=int, nargs="+", required=True)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    e = sub.add_parser("expand", help="coefficients T_0..T_Q with per-face breakdown")
    common(e)
    e.add_argument("--Q", type=int, default=2)
    e.add_argument("--csv", default=None)
    tolerances(e)

    c = sub.add_parser("converge", help="remainders R_N = |S_N - P_N| and fitted log-log slope")
    common(c)
    c.add_argument("--Q", type=int, default=2)
    c.add_argument("--N-list", type=int, nargs="+", required=True)
    c.add_argument("--csv", default=None)
    c.add_argument("--include-smallest", action="store_true", help="keep the smallest N in the slope fit")
    tolerances(c)

    v = sub.add_parser("validate", help="check the Delzant conditions and print lattice constants")
    common(v, needs_f=False)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = RunSpec(
        command=args.command,
        polytope=args.polytope,
        function=getattr(args, "f", None),
        Q=getattr(args, "Q", None),
        N=list(getattr(args, "N", None) or getattr(args, "N_list", None) or []),
        abs_tol=getattr(args, "abs_tol", None),
        rel_tol=getattr(args, "rel_tol", None),
        delta=getattr(args, "delta", None),
        threads=args.threads,
        seed=args.seed,
        output=getattr(args, "csv", None),
        format="csv" if getattr(args, "csv", None) else "table",
    )
    try:
        spec.validate()
        if not Path(spec.polytope).is_file():
            raise FileNotFoundError(f"no such polytope file: {spec.polytope}")
        print(spec.header())
        return COMMANDS[args.command](spec, args)
    except (GeometryError, ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TooManyPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ToleranceNotReached, DomainError, PartitionFailure, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
