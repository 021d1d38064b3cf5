"""Separated-set box dimension estimators and exceptional-set scans.

The estimators follow the separated-point definitions: s_delta(E) is the
maximal number of points of E that are pairwise more than delta apart,
and the box dimension estimate is the least-squares slope of log s_delta
against |log delta| over a ladder of deltas.  Everything here is a
finite-resolution diagnostic; no asymptotic verdicts are drawn from it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .padic import PAdicApprox, padic_valuation

_DEDUP_EPS = 2.0 ** -52

DEFAULT_LADDER = tuple(2.0 ** -k for k in range(4, 13))


@dataclass(frozen=True)
class PointSet1D:
    """Sorted, deduplicated sample of real points with a provenance label."""

    points: tuple[float, ...]
    label: str = ""

    @classmethod
    def from_values(cls, values, label: str = "") -> "PointSet1D":
        pts = sorted(float(x) for x in values)
        out = []
        for x in pts:
            if not out or x - out[-1] > _DEDUP_EPS:
                out.append(x)
        return cls(tuple(out), label)

    def __len__(self) -> int:
        return len(self.points)


def separated_count(s: PointSet1D, delta: float) -> int:
    """Exact maximal size of a delta-separated subset (gaps strictly
    greater than delta).  In one dimension the left-to-right greedy sweep
    is optimal."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    count = 0
    last = None
    for x in s.points:
        if last is None or x - last > delta:
            count += 1
            last = x
    return count


@dataclass(frozen=True)
class BoxDimFit:
    """Least-squares fit of log s_delta against |log delta|."""

    slope: float
    intercept: float
    ladder: tuple[float, ...]
    counts: tuple[int, ...]
    residuals: tuple[float, ...]

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r) for r in self.residuals)

    def csv_rows(self):
        return [(repr(d), str(c)) for d, c in zip(self.ladder, self.counts)]

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "slope": self.slope,
            "intercept": self.intercept,
            "n_rungs": len(self.ladder),
            "max_abs_residual": self.max_abs_residual,
        }


def box_dim_estimate(s: PointSet1D,
                     delta_ladder: Sequence[float] = DEFAULT_LADDER
                     ) -> BoxDimFit:
    """Finite-resolution box dimension estimate of a 1D sample.

    This is an estimator of the counting slope over the given ladder, not
    of the limsup itself.
    """
    ladder = tuple(float(d) for d in delta_ladder)
    if len(ladder) < 4:
        raise ValueError("delta ladder needs at least 4 rungs")
    if any(d2 >= d1 for d1, d2 in zip(ladder, ladder[1:])):
        raise ValueError("delta ladder must be strictly decreasing")
    if any(d <= 0 for d in ladder):
        raise ValueError("delta ladder must be positive")
    if len(s) == 0:
        raise ValueError("empty point set")
    counts = tuple(separated_count(s, d) for d in ladder)
    xs = np.array([abs(math.log(d)) for d in ladder])
    ys = np.array([math.log(c) for c in counts])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = tuple(float(y - (slope * x + intercept)) for x, y in zip(xs, ys))
    return BoxDimFit(float(slope), float(intercept), ladder, counts, resid)


# ---------------------------------------------------------------------------
# exceptional-set scan (finite-horizon survivors of the two-parameter product)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExceptionalScanResult:
    """Grid points whose finite-horizon product minimum stays above delta.

    The survivor set is an explicit SUPERSET surrogate of the exceptional
    set at this resolution: a finite horizon can only prove non-exclusion.
    For non-survivors the scan short-circuits at the disqualifying q, so
    their reported min_product is an upper bound at or below delta.
    """

    survivors: PointSet1D
    us: tuple[float, ...]
    min_products: tuple[float, ...]
    delta: float
    q_max: int
    prime: int

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "min_product", "survivor"])
            for u, m in zip(self.us, self.min_products):
                w.writerow([repr(u), repr(m), int(m > self.delta)])

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "delta": self.delta,
            "q_max": self.q_max,
            "prime": self.prime,
            "grid_size": len(self.us),
            "survivor_count": len(self.survivors),
        }


def exceptional_scan(v: Union[PAdicApprox, int], p: int, delta: float,
                     q_max: int, u_grid: Sequence[float],
                     q0_min: int = 2) -> ExceptionalScanResult:
    """Scan a u grid for finite-horizon survivors of the two-parameter
    product |q| |q u - q0| |q v - q0|_p > delta for all q <= q_max.

    q0 runs over the candidate ladder (nearest integers per residue class
    q0 = q v mod p^j with |q0| >= q0_min).  Dead grid points stop being
    scanned as soon as one product at or below delta appears.
    """
    if isinstance(v, int):
        v = PAdicApprox.from_int(v, p)
    if delta <= 0:
        raise ValueError("delta must be positive")
    us = np.asarray(list(u_grid), dtype=np.float64)
    mins = np.full(us.shape, np.inf)
    alive = np.ones(us.shape, dtype=bool)
    if not v.is_zero and v.valuation < 0:
        raise ValueError("v must lie in Z_p for the survivor scan")
    for q in range(1, q_max + 1):
        if not alive.any():
            break
        ua = us[alive]
        qu = q * ua
        if v.is_zero:
            vq = 0
            res = lambda pj: 0
        else:
            vq = padic_valuation(q, p) if q else 0
            val_int = v.unit_int() * p ** v.valuation
            res = lambda pj: (q * val_int) % pj
        best = np.full(ua.shape, np.inf)
        pj = 1
        j = 0
        span = 2.0 * (np.abs(qu).max() + q0_min + 2.0)
        while pj <= span or j == 0:
            r = res(pj) if j > 0 else 0
            step = pj if j > 0 else 1
            k = np.rint((qu - r) / step)
            hi_edge = r + step * math.ceil((q0_min - r) / step)
            lo_edge = r + step * math.floor((-q0_min - r) / step)
            fac = 1.0 / step
            for kk in (k, k + 1, k - 1):
                q0 = r + kk * step
                cand = np.where(np.abs(q0) < q0_min, np.inf,
                                q * np.abs(qu - q0) * fac)
                best = np.minimum(best, cand)
            # class members at the |q0| >= q0_min boundary on both sides
            for q0e in (hi_edge, lo_edge):
                if abs(q0e) >= q0_min:
                    best = np.minimum(best, q * np.abs(qu - q0e) * fac)
            pj *= p
            j += 1
            if not v.is_zero and j > v.precision + vq:
                break
        mins_alive = np.minimum(mins[alive], best)
        mins[alive] = mins_alive
        alive[alive] = mins_alive > delta
    survivors = PointSet1D.from_values(
        us[mins > delta],
        label=f"E_v(delta={delta}, Q={q_max}) grid survivors")
    return ExceptionalScanResult(survivors, tuple(us.tolist()),
                                 tuple(mins.tolist()), delta, q_max, p)


# ---------------------------------------------------------------------------
# separated orbit counts (finite-sample topological-entropy diagnostics)
# ---------------------------------------------------------------------------

def separation_count_entropy(orbits: Sequence[Sequence[float]],
                             epsilon: float, n_steps: int) -> int:
    """Maximal number of orbit segments pairwise separated within n steps.

    Two segments are separated when some step k < n_steps has
    |h_i[k] - h_j[k]| > epsilon; since the observable is 1-Lipschitz in
    the underlying metric, the count is a finite-sample lower bound on
    the separated-orbit count that enters topological entropy.  Exact
    (branch and bound over the separation graph), so the count is
    non-decreasing in n_steps.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    m = len(orbits)
    if m == 0:
        return 0
    for o in orbits:
        if len(o) < n_steps:
            raise ValueError("every orbit segment needs at least n_steps samples")
    adj = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if any(abs(orbits[i][k] - orbits[j][k]) > epsilon
                   for k in range(n_steps)):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return _max_clique(adj)


def _max_clique(adj: list[int]) -> int:
    """Exact maximum clique size on a bitmask adjacency list."""
    n = len(adj)
    best = 0

    def grow(cand: int, size: int):
        nonlocal best
        if size + cand.bit_count() <= best:
            return
        if cand == 0:
            best = max(best, size)
            return
        # branch on the lowest candidate vertex: either take it or not
        v = (cand & -cand).bit_length() - 1
        grow(cand & adj[v], size + 1)
        grow(cand & ~(1 << v), size)

    grow((1 << n) - 1, 0)
    return best


def profile_time_series(profile, n_steps: int,
                        t_tol: float = 1e-9) -> list[float]:
    """Heights of a cone profile at integer times t = 0..n_steps-1, n = 0.

    This is the observable sequence of the time-one map along the real
    flow direction, ready for separation counting.
    """
    by_t = {}
    for c in profile.cells:
        if c.n == 0 and abs(c.t - round(c.t)) < t_tol:
            by_t[int(round(c.t))] = c.height
    out = []
    for k in range(n_steps):
        if k not in by_t:
            raise ValueError(f"profile has no n=0 cell at integer time {k}")
        out.append(by_t[k])
    return out
