"""Partition-of-unity expansion on the unit 3-simplex.

Checks three things and prints a short report:

* f = 1 against the Ehrhart expansion binomial(N+3, 3)/N^3 = 1/6 + 1/N + 11/(6N^2) + 1/N^3;
* a smooth f under two different partitions (margin and bump profile);
* the remainder slope of the Q = 2 truncation against brute-force sums.

Takes about a minute.
"""

import argparse
import time
from dataclasses import dataclass, field

from eulermac.analysis import convergence_report
from eulermac.expansion import polytope3_expansion
from eulermac.functions import ExpressionFunction, function_from_source
from eulermac.geometry import unit_simplex


@dataclass
class Config:
    function: str = "exp(x1/2 + x2/3 - x3/4)"
    second_delta: float = 0.2
    second_profile: str = "exp2"
    N: list[int] = field(default_factory=lambda: [8, 12, 16, 24, 32, 48, 64])
    out: str | None = None


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--function", default=Config.function)
    p.add_argument("--second-delta", type=float, default=Config.second_delta)
    p.add_argument("--second-profile", choices=("exp", "exp2"), default=Config.second_profile)
    p.add_argument("--csv", default=None, help="write the convergence rows here")
    a = p.parse_args()
    cfg = Config(a.function, a.second_delta, a.second_profile, out=a.csv)
    simplex = unit_simplex(3)

    t0 = time.perf_counter()
    ones = polytope3_expansion(simplex, function_from_source("1", 3), 3)
    ehrhart = (1 / 6, 1.0, 11 / 6, 1.0)
    print("f = 1:")
    for q, (t, e) in enumerate(zip(ones.T, ehrhart)):
        print(f"  T_{q} = {t:.12f}   Ehrhart {e:.12f}   diff {abs(t - e):.1e}")
    print(f"  ({time.perf_counter() - t0:.1f} s)")

    f = ExpressionFunction(cfg.function, 3)
    t0 = time.perf_counter()
    a_res = polytope3_expansion(simplex, f, 2)
    b_res = polytope3_expansion(simplex, f, 2, delta=cfg.second_delta, profile=cfg.second_profile)
    print(f"f = {cfg.function}:")
    for q, (x, y) in enumerate(zip(a_res.T, b_res.T)):
        print(f"  T_{q}: default partition {x:.12f}   delta={cfg.second_delta} {cfg.second_profile} {y:.12f}"
              f"   diff {abs(x - y):.1e}")
    print(f"  ({time.perf_counter() - t0:.1f} s)")

    rep = convergence_report(simplex, f, 2, cfg.N, expansion=a_res)
    for r in rep.rows:
        print(f"  N = {r.N:>3}  R_N = {float(r.R):.3e}")
    print(f"  Q = 2 remainder slope {rep.slope:.3f} over N = {rep.fit_N}")
    if cfg.out:
        rep.meta = {"function": cfg.function, "Q": 2}
        rep.to_csv(cfg.out)


if __name__ == "__main__":
    main()
