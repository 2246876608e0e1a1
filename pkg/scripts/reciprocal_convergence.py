"""Compare S_N with the truncated expansion P_N for f = 1/(1 + x1 + x2) on the unit triangle.

Writes one CSV row per N (columns N, S_N, P_N, R_N, log10N, log10R) and
prints the fitted remainder slope, which should be close to -(Q + 1).

    python3 scripts/reciprocal_convergence.py --out results/reciprocal.csv
"""

import argparse
from dataclasses import asdict, dataclass, field
from pathlib import Path

from eulermac.analysis import convergence_report
from eulermac.expansion import polygon_expansion
from eulermac.functions import ExpressionFunction
from eulermac.geometry import unit_simplex


@dataclass
class Config:
    function: str = "1/(1+x1+x2)"
    Q: int = 2
    N: list[int] = field(default_factory=lambda: [10, 25, 50, 75, 100, 250, 500, 750, 1000])
    threads: int = 1
    out: str = "results/reciprocal_convergence.csv"


def run(cfg: Config):
    triangle = unit_simplex(2)
    f = ExpressionFunction(cfg.function, 2)
    expansion = polygon_expansion(triangle, f, cfg.Q)
    rep = convergence_report(triangle, f, cfg.Q, cfg.N, expansion=expansion, threads=cfg.threads)
    rep.meta = asdict(cfg)
    Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
    rep.to_csv(cfg.out)
    return expansion, rep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--function", default=Config.function)
    p.add_argument("--Q", type=int, default=Config.Q)
    p.add_argument("--N", type=int, nargs="+", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=Config.out)
    a = p.parse_args()
    cfg = Config(a.function, a.Q, a.N or Config().N, a.threads, a.out)
    expansion, rep = run(cfg)
    for q, t in enumerate(expansion.T):
        print(f"T_{q} = {t!r}")
    print(f"{'N':>6} {'S_N':>22} {'P_N':>22} {'R_N':>10}")
    for r in rep.rows:
        print(f"{r.N:>6} {float(r.S):>22.16f} {float(r.P):>22.16f} {float(r.R):>10.3e}")
    lo, hi = rep.slope_ci
    print(f"slope {rep.slope:.4f}  (95% CI {lo:.4f} .. {hi:.4f}, fitted on N = {rep.fit_N})")
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    main()
