"""Brute-force lattice Riemann sums and convergence-order fits.

Enumeration is exact: the last coordinate's range for every prefix of the
other coordinates comes from integer floor/ceil division of the facet
inequalities, so boundary points are never lost to rounding.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .functions import SmoothFunction, as_polynomial
from .geometry import DelzantPolytope, RegularWedge

DEFAULT_BUDGET = 10 ** 9
# points per evaluation chunk; fixed so results do not depend on thread count
CHUNK_POINTS = 1 << 18


class TooManyPoints(RuntimeError):
    def __init__(self, count: int, budget: int):
        self.count, self.budget = count, budget
        super().__init__(f"enumeration needs {count} lattice points, budget is {budget}")


@dataclass(frozen=True)
class RiemannSum:
    N: int
    count: int
    value: float | Fraction
    exact: bool


@dataclass(frozen=True)
class _Lattice:
    """Integer points ``k`` with ``<u, k> <= C`` and ``lo <= k <= hi``."""

    normals: np.ndarray  # (m, n) int64
    rhs: np.ndarray  # (m,) int64
    lo: tuple[int, ...]
    hi: tuple[int, ...]


def _lattice(region, N: int, box=None) -> _Lattice:
    if isinstance(region, DelzantPolytope):
        lo, hi = region.bounding_box()
        lo = tuple(a * N for a in lo)
        hi = tuple(b * N for b in hi)
    elif isinstance(region, RegularWedge):
        if box is None:
            raise ValueError("a wedge needs a bounding box to be enumerated")
        lo = tuple(math.ceil(Fraction(a) * N) for a in box[0])
        hi = tuple(math.floor(Fraction(b) * N) for b in box[1])
    else:
        raise TypeError(f"cannot enumerate {type(region).__name__}")
    U = np.array(region.normals, dtype=np.int64).reshape(len(region.normals), -1)
    C = np.array([c * N for c in region.offsets], dtype=np.int64)
    return _Lattice(U, C, lo, hi)


def _prefix_ranges(lat: _Lattice) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All prefixes (first n-1 coordinates) with their last-coordinate range."""
    n = len(lat.lo)
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lat.lo[:-1], lat.hi[:-1])]
    if axes:
        grids = np.meshgrid(*axes, indexing="ij")
        P = np.stack([g.ravel() for g in grids], axis=1)
    else:
        P = np.zeros((1, 0), dtype=np.int64)
    low = np.full(len(P), lat.lo[-1], dtype=np.int64)
    high = np.full(len(P), lat.hi[-1], dtype=np.int64)
    ok = np.ones(len(P), dtype=bool)
    for u, c in zip(lat.normals, lat.rhs):
        rest = c - P @ u[:-1] if n > 1 else np.full(len(P), c, dtype=np.int64)
        a = int(u[-1])
        if a > 0:
            high = np.minimum(high, np.floor_divide(rest, a))
        elif a < 0:
            low = np.maximum(low, -np.floor_divide(rest, -a))  # ceil(rest / a)
        else:
            ok &= rest >= 0
    ok &= high >= low
    return P[ok], low[ok], high[ok]


def lattice_count(region, N: int, box=None) -> int:
    _, low, high = _prefix_ranges(_lattice(region, N, box))
    return int((high - low + 1).sum())


def _chunks(P, low, high):
    """Yield integer point arrays of at most about ``CHUNK_POINTS`` points."""
    sizes = high - low + 1
    start = 0
    while start < len(P):
        cum = np.cumsum(sizes[start:])
        stop = start + max(1, int(np.searchsorted(cum, CHUNK_POINTS, side="right")))
        sz = sizes[start:stop]
        reps = np.repeat(np.arange(start, stop), sz)
        offs = np.arange(int(sz.sum())) - np.repeat(np.cumsum(sz) - sz, sz)
        last = low[reps] + offs
        yield np.concatenate([P[reps], last[:, None]], axis=1)
        start = stop


def _exact_chunk_sum(p, pts: np.ndarray) -> dict:
    """``sum_k k^e`` for every exponent ``e`` of ``p`` over the chunk, as Python ints."""
    deg = max(p.degree, 0)
    bound = int(np.abs(pts).max(initial=0)) + 1
    safe = bound ** deg * len(pts) < 2 ** 62
    K = pts if safe else pts.astype(object)
    out = {}
    for e in p.terms:
        prod = np.ones(len(pts), dtype=np.int64 if safe else object)
        for i, k in enumerate(e):
            if k:
                prod = prod * K[:, i] ** k
        out[e] = int(prod.sum())
    return out


def riemann_sum(region, f: SmoothFunction, N: int, threads: int = 1, exact: bool | None = None,
                budget: int = DEFAULT_BUDGET, box=None) -> RiemannSum:
    """``(1/N^n) sum_{k in Z^n cap N region} f(k/N)`` by direct enumeration.

    Exact (a Fraction) when ``f`` is a polynomial, unless ``exact=False``.
    Wedges are cut to ``box`` (default ``f.support_box()``).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if isinstance(region, RegularWedge) and box is None:
        box = f.support_box()
    lat = _lattice(region, N, box)
    n = len(lat.lo)
    P, low, high = _prefix_ranges(lat)
    count = int((high - low + 1).sum())
    if count > budget:
        raise TooManyPoints(count, budget)
    p = as_polynomial(f)
    exact = p is not None if exact is None else exact
    if exact and p is None:
        raise ValueError("exact Riemann sums need a polynomial f")
    chunks = list(_chunks(P, low, high)) if count else []

    if exact:
        totals = {e: 0 for e in p.terms}
        for pts in chunks:
            for e, s in _exact_chunk_sum(p, pts).items():
                totals[e] += s
        value = sum((c * Fraction(totals[e], N ** (sum(e) + n)) for e, c in p.terms.items()), Fraction(0))
        return RiemannSum(N, count, value, True)

    def chunk_sum(pts):
        return math.fsum(f.eval(pts / float(N)))

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(chunk_sum, chunks))
    else:
        parts = [chunk_sum(c) for c in chunks]
    return RiemannSum(N, count, math.fsum(parts) / float(N) ** n, False)


# ---------------------------------------------------------------------------
# convergence


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    S: float | Fraction
    P: float | Fraction
    R: float | Fraction

    @property
    def log10N(self) -> float:
        return math.log10(self.N)

    @property
    def log10R(self) -> float:
        return math.log10(self.R) if self.R > 0 else float("-inf")


@dataclass
class ConvergenceReport:
    Q: int
    rows: list[ConvergenceRow]
    slope: float | None
    slope_ci: tuple[float, float] | None
    fit_N: tuple[int, ...] = ()
    meta: dict = field(default_factory=dict)

    def to_csv(self, path: str | Path) -> None:
        write_csv(self, path)


def fit_slope(Ns: Sequence[int], Rs: Sequence[float], confidence: float = 0.95):
    """Least-squares slope of ``log R`` against ``log N`` and its t-interval."""
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray([float(r) for r in Rs]))
    if len(x) < 2:
        return None, None
    res = stats.linregress(x, y)
    if len(x) < 3:
        return float(res.slope), (float(res.slope), float(res.slope))
    half = stats.t.ppf(0.5 + confidence / 2, len(x) - 2) * res.stderr
    return float(res.slope), (float(res.slope - half), float(res.slope + half))


def convergence_report(region, f: SmoothFunction, Q: int, N_list: Sequence[int], expansion=None,
                       cfg=None, threads: int = 1, exclude_smallest: bool = True, box=None) -> ConvergenceReport:
    """Compare oracle sums ``S_N`` with partial sums ``P_N = sum_{q<=Q} T_q N^-q``."""
    if expansion is None:
        from .expansion import expand
        from .quadrature import QuadratureConfig
        expansion = expand(region, f, Q, cfg or QuadratureConfig())
    rows = []
    for N in sorted(set(N_list)):
        S = riemann_sum(region, f, N, threads=threads, exact=expansion.exact and as_polynomial(f) is not None,
                        box=box).value
        P = expansion.partial_sum(N, Q)
        if isinstance(S, Fraction) and isinstance(P, Fraction):
            R = abs(S - P)
        else:
            S, P = float(S), float(P)
            R = abs(S - P)
        rows.append(ConvergenceRow(N, S, P, R))
    fit = rows[1:] if exclude_smallest and len(rows) > 2 else rows
    fit = [r for r in fit if r.R > 0]
    slope, ci = fit_slope([r.N for r in fit], [r.R for r in fit])
    return ConvergenceReport(Q, rows, slope, ci, tuple(r.N for r in fit))


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def _parse(s: str):
    if "/" in s:
        return Fraction(s)
    return float(s)


CSV_COLUMNS = ("N", "S_N", "P_N", "R_N", "log10N", "log10R")


def write_csv(report: ConvergenceReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for k, v in report.meta.items():
            w.writerow([f"# {k}", v])
        w.writerow(CSV_COLUMNS)
        for r in report.rows:
            w.writerow([r.N, _fmt(r.S), _fmt(r.P), _fmt(r.R), repr(r.log10N), repr(r.log10R)])
        lo, hi = report.slope_ci if report.slope_ci else (None, None)
        w.writerow(["# slope", repr(report.slope), repr(lo), repr(hi), "Q", report.Q,
                    "fit_N", " ".join(map(str, report.fit_N))])


def read_csv(path: str | Path) -> ConvergenceReport:
    rows, meta = [], {}
    slope = ci = None
    Q = -1
    fit_N: tuple[int, ...] = ()
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            if rec[0] == "# slope":
                slope = None if rec[1] == "None" else float(rec[1])
                ci = None if rec[2] == "None" else (float(rec[2]), float(rec[3]))
                Q = int(rec[5])
                fit_N = tuple(int(x) for x in rec[7].split())
            elif rec[0].startswith("# "):
                meta[rec[0][2:]] = rec[1]
            elif rec[0] != "N":
                rows.append(ConvergenceRow(int(rec[0]), _parse(rec[1]), _parse(rec[2]), _parse(rec[3])))
    return ConvergenceReport(Q, rows, slope, ci, fit_N, meta)
