"""Fitted remainder slopes for every truncation order Q = 0..3 on the bundled polygons.

The slope of log R_N against log N should be about -(Q + 1).  Prints a table
and optionally writes it as CSV.
"""

import argparse
import csv
from pathlib import Path

from eulermac.analysis import convergence_report
from eulermac.expansion import polygon_expansion
from eulermac.functions import ExpressionFunction
from eulermac.geometry import load_polytope

POLYTOPES = Path(__file__).resolve().parent.parent / "polytopes"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--function", default="exp(x1/2 - x2/3)*cos(x1 + x2/2)")
    p.add_argument("--N", type=int, nargs="+", default=[10, 20, 40, 80, 160, 320])
    p.add_argument("--max-Q", type=int, default=3)
    p.add_argument("--csv", default=None)
    a = p.parse_args()
    f = ExpressionFunction(a.function, 2)
    rows = []
    for name in ("triangle", "square", "hexagon"):
        poly = load_polytope(POLYTOPES / f"{name}.txt")
        expansion = polygon_expansion(poly, f, a.max_Q)
        for Q in range(a.max_Q + 1):
            rep = convergence_report(poly, f, Q, a.N, expansion=expansion)
            lo, hi = rep.slope_ci
            rows.append((name, Q, rep.slope, lo, hi))
            print(f"{name:>9}  Q = {Q}  slope {rep.slope:8.4f}  (95% CI {lo:.4f} .. {hi:.4f})  expected {-(Q + 1)}")
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["polytope", "Q", "slope", "ci_lo", "ci_hi"])
            w.writerows([r[0], r[1], repr(r[2]), repr(r[3]), repr(r[4])] for r in rows)


if __name__ == "__main__":
    main()
