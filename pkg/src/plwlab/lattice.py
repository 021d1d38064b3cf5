"""Diagonal flows on lattices in R^2 x Qp^2 and Mahler-style heights.

Points are unimodular Z[1/p]-module lattices presented by a real and a
p-adic 2x2 generator matrix; the flow acts by diagonal scaling on both
factors.  The central primitive is a certified shortest-nonzero-vector
search: every lattice element is a Z[1/p]-combination (q, q0) of the two
generators, and for the construction-tagged points used here the four
vector components have closed forms in (q, q0), which turns the search
into a bounded two-dimensional lattice enumeration per denominator level.

The norm on R^2 x Qp^2 is max(sup-norm of the real pair, max of the two
p-adic norms); heights are -log of the shortest vector norm.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .contfrac import QuadIrr
from .diophantine import _UContext, _qv_minus_q0_norm, UValue
from .padic import (PAdicApprox, PrecisionError, ZInvP, check_prime,
                    padic_valuation)

MAX_SAFE_T = 700.0


class FlowRangeError(OverflowError):
    """Flow time t would overflow the binary64 exponent range."""

    def __init__(self, t: float, max_safe: float):
        super().__init__(
            f"flow time {t} exceeds the safe range; |t| must stay below "
            f"{max_safe}")
        self.max_safe_t = max_safe


@dataclass(frozen=True)
class ConePoint:
    t: float
    n: int


@dataclass(frozen=True)
class Cone:
    """Intersection of half planes acting on (t, n log p) coordinates."""

    normals: tuple[tuple[float, float], ...]
    name: str = "custom"

    def contains(self, t: float, n: int, p: int, tol: float = 1e-9) -> bool:
        y = n * math.log(p)
        return all(v0 * t + v1 * y >= -tol for v0, v1 in self.normals)

    def validate(self, p: int) -> None:
        """Check the cone has nonempty interior (so its integer points
        generate all of R x Z)."""
        for t in (0.5, 1.0, 2.0, 4.0, 8.0):
            for n in range(-4, 5):
                y = n * math.log(p)
                if all(v0 * t + v1 * y > 1e-9 for v0, v1 in self.normals) \
                        and n != 0:
                    return
                if all(v0 * t + v1 * y > 1e-9 for v0, v1 in self.normals):
                    # interior along n = 0 alone is not enough; keep looking
                    continue
        # fall back: require some strictly interior point with n != 0
        raise ValueError(f"cone {self.name} has empty interior in R x Z")


def cone_g() -> Cone:
    """n >= 0 and t - n log p >= 0 (the expanding quadrant used with v)."""
    return Cone(((0.0, 1.0), (1.0, -1.0)), "C")


def cone_mt() -> Cone:
    """n <= 0 and t + n log p >= 0 (the mirror cone for the p-norm product)."""
    return Cone(((0.0, -1.0), (1.0, 1.0)), "Cprime")


def named_cone(name: str) -> Cone:
    if name == "C":
        return cone_g()
    if name in ("Cprime", "C'"):
        return cone_mt()
    raise ValueError(f"unknown cone {name!r} (use C or Cprime)")


# ---------------------------------------------------------------------------
# lattice points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticePoint:
    """A flow translate of the unipotent point x_{u,v}.

    The generator matrices are A = diag(e^-t, e^t) [[1,0],[u,1]] on the
    real side and B = diag(p^n, p^-n) [[1,0],[v,1]] on the p-adic side.
    `gen_scale` records a presentation of the same lattice with both
    generators multiplied by p^gen_scale; the module is unchanged, which
    the search canonicalizes away.
    """

    u: UValue
    v: PAdicApprox
    prime: int
    t: float = 0.0
    n: int = 0
    gen_scale: int = 0
    v_shift: int = 0

    @property
    def tag(self) -> str:
        base = f"x_(u={self.u}, v={self.v})"
        if self.t or self.n:
            base += f" . flow(t={self.t}, n={self.n})"
        if self.v_shift:
            base += f" [v scaled by {self.prime}^{self.v_shift}]"
        return base

    @property
    def A(self) -> list[list[float]]:
        if abs(self.t) > MAX_SAFE_T:
            raise FlowRangeError(self.t, MAX_SAFE_T)
        et = math.exp(self.t)
        emt = math.exp(-self.t)
        uf = float(self.u) if not isinstance(self.u, Fraction) else float(self.u)
        return [[emt, 0.0], [et * uf, et]]

    @property
    def B(self) -> list[list[PAdicApprox]]:
        p = self.prime
        one = PAdicApprox.from_int(1, p)
        zero = PAdicApprox.zero(p)
        return [[one.shift(self.n), zero],
                [self.v.shift(-self.n), one.shift(-self.n)]]

    def rescaled(self, j: int) -> "LatticePoint":
        """Same lattice, generators presented multiplied by p^j."""
        return LatticePoint(self.u, self.v, self.prime, self.t, self.n,
                            self.gen_scale + j, self.v_shift)

    def with_u_shift(self, du: UValue) -> "LatticePoint":
        """Left-multiply by the real lower-unipotent matrix for du.

        Only defined before any flow has been applied, where the product
        of unipotents is again a tagged point x_{u+du, v}.
        """
        if self.t != 0.0 or self.n != 0:
            raise ValueError("unipotent shift only defined at flow time zero")
        if isinstance(self.u, QuadIrr) or isinstance(du, QuadIrr):
            new_u = _add_uvals(self.u, du)
        else:
            new_u = self.u + du
        return LatticePoint(new_u, self.v, self.prime, 0.0, 0,
                            self.gen_scale, self.v_shift)


def _add_uvals(a: UValue, b: UValue):
    if isinstance(a, QuadIrr):
        return a + (Fraction(b) if not isinstance(b, QuadIrr) else b)
    if isinstance(b, QuadIrr):
        return b + Fraction(a)
    return a + b


def lattice_point(u: UValue, v: Union[PAdicApprox, int], p: int) -> LatticePoint:
    """The point x_{u,v}; v outside Z_p is scaled into it by a recorded
    power of p (the exceptional sets of the scaled and unscaled values
    contain each other accordingly)."""
    check_prime(p)
    if isinstance(v, int):
        v = PAdicApprox.from_int(v, p)
    if v.prime != p:
        raise ValueError("v lives over a different prime")
    shift = 0
    if not v.is_zero and v.valuation < 0:
        shift = -v.valuation
        v = v.shift(shift)
    return LatticePoint(u, v, p, v_shift=shift)


def apply_alpha(x: LatticePoint, s: Union[ConePoint, tuple]) -> LatticePoint:
    """Flow the point by diag(e^-t, e^t) x diag(p^n, p^-n)."""
    if not isinstance(s, ConePoint):
        s = ConePoint(float(s[0]), int(s[1]))
    t = x.t + s.t
    if abs(t) > MAX_SAFE_T:
        raise FlowRangeError(t, MAX_SAFE_T)
    return LatticePoint(x.u, x.v, x.prime, t, x.n + s.n, x.gen_scale,
                        x.v_shift)


# ---------------------------------------------------------------------------
# lattice vectors and the certified shortest-vector search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeVector:
    """One module element: the pair (q, q0) in Z[1/p]^2 with its
    components in R^2 x Qp^2 and their max norm."""

    q: ZInvP
    q0: ZInvP
    real_part: tuple[float, float]
    padic_part: tuple[Optional[PAdicApprox], Optional[PAdicApprox]]
    norm: float
    exact: bool = True


@dataclass(frozen=True)
class SearchBudget:
    mu_start: float = 2.0
    mu_max: float = 2.0 ** 16
    max_candidates: int = 500_000
    max_passes: int = 48


@dataclass(frozen=True)
class ShortestVectorResult:
    norm: float
    witness: LatticeVector
    certified: bool


def _lin_padic_val(v: PAdicApprox, a: int, b: int) -> tuple[Optional[int], bool]:
    """Valuation of a*v - b; None means the value is exactly zero.

    Returns (valuation, exact); when the knowledge window is exhausted the
    valuation reported is the certified lower bound with exact=False.
    """
    p = v.prime
    if a == 0 or v.is_zero:
        if b == 0:
            return None, True
        return padic_valuation(b, p), True
    w = v.valuation
    va = padic_valuation(a, p)
    cap = w + va + v.precision
    R = (a * v.unit_int() * p ** w - b) % p ** cap
    if R == 0:
        return cap, False
    return padic_valuation(R, p), True


def _ppow(p: int, e: int) -> float:
    """p^e as a float, saturating instead of raising on overflow."""
    try:
        if e >= 0:
            val = p ** e
            return float(val) if val < 10 ** 300 else math.inf
        val = p ** (-e)
        return 1.0 / val if val < 10 ** 300 else 0.0
    except OverflowError:
        return math.inf if e > 0 else 0.0


class _VectorSpace:
    """Closed-form component evaluation for vectors of one lattice point."""

    def __init__(self, x: LatticePoint):
        if abs(x.t) > MAX_SAFE_T:
            raise FlowRangeError(x.t, MAX_SAFE_T)
        self.x = x
        self.p = x.prime
        self.lp = math.log(x.prime)
        self.ctx = _UContext(x.u)
        self.t = x.t
        self.n = x.n

    def eval(self, a: int, b: int, mm: int) -> tuple[float, bool]:
        """Norm of the vector for (q, q0) = p^-mm (a, b); (0,0) is invalid."""
        p, t, n = self.p, self.t, self.n
        r1 = abs(a) * math.exp(-t - mm * self.lp)
        r2 = self.ctx.dist_linear(a, b) * math.exp(t - mm * self.lp) \
            if (a, b) != (0, 0) else 0.0
        if a == 0:
            n1 = 0.0
        else:
            n1 = _ppow(p, mm - n - padic_valuation(a, p))
        val2, exact = _lin_padic_val(self.x.v, a, b)
        n2 = 0.0 if val2 is None else _ppow(p, n + mm - val2)
        return max(r1, r2, n1, n2), exact

    def make_vector(self, a: int, b: int, mm: int) -> LatticeVector:
        p, t, n = self.p, self.t, self.n
        nrm, exact = self.eval(a, b, mm)
        q = ZInvP.make(a, mm, p)
        q0 = ZInvP.make(b, mm, p)
        r1 = (a * math.exp(-t - mm * self.lp))
        r2 = ((self.ctx.ufloat * a - b) * math.exp(t - mm * self.lp))
        c1 = PAdicApprox.from_int(a, p).shift(n - mm) if a else PAdicApprox.zero(p)
        try:
            c2 = (self.x.v * a - b).shift(-n - mm) if (a or b) else PAdicApprox.zero(p)
            if self.x.v.is_zero and b == 0:
                c2 = PAdicApprox.zero(p)
        except PrecisionError:
            c2 = None
        return LatticeVector(q, q0, (r1, r2), (c1, c2), nrm, exact)


def _gauss_reduce(b1, b2):
    """Lagrange-Gauss reduction of a 2D real basis, tracking the integer
    column transform: returns (w1, w2, (u11,u12,u21,u22)) with
    w1 = u11*b1 + u21*b2 and w2 = u12*b1 + u22*b2."""
    u11, u12, u21, u22 = 1, 0, 0, 1
    w1, w2 = b1, b2

    def n2(v):
        return v[0] * v[0] + v[1] * v[1]

    if n2(w1) > n2(w2):
        w1, w2 = w2, w1
        u11, u12, u21, u22 = u12, u11, u22, u21
    for _ in range(256):
        denom = n2(w1)
        if denom == 0.0:
            break
        r = round((w2[0] * w1[0] + w2[1] * w1[1]) / denom)
        if r:
            w2 = (w2[0] - r * w1[0], w2[1] - r * w1[1])
            u12 -= r * u11
            u22 -= r * u21
        if n2(w2) >= n2(w1):
            break
        w1, w2 = w2, w1
        u11, u12, u21, u22 = u12, u11, u22, u21
    return w1, w2, (u11, u12, u21, u22)


def _enumerate_below(space: _VectorSpace, mu: float, max_candidates: int):
    """All vectors with norm < mu, via per-level 2D box enumeration.

    Returns (best_norm, best_triple, best_exact, complete).  The level
    bounds and the divisibility sublattice per level come from the
    component inequalities, so the enumeration provably covers every
    vector below mu as long as the candidate cap is not hit.
    """
    p, t, n = space.p, space.t, space.n
    lp = space.lp
    v = space.x.v
    lmu = math.log(mu) / lp
    m_lo = math.floor(-t / lp - lmu) - 1
    # canonical (a, b) with p dividing at most one of them force
    # mm < |n| + log_p(mu) through one of the two p-adic components
    m_hi = math.ceil(abs(n) + lmu) + 1
    uf = space.ctx.ufloat

    best = math.inf
    best_abm = None
    best_exact = True
    count = 0
    complete = True
    window = None if v.is_zero else v.valuation + v.precision

    for mm in range(m_lo, m_hi + 1):
        k_a = max(0, math.floor(mm - n - lmu) + 1)
        k_b = max(0, math.floor(n + mm - lmu) + 1)
        if window is not None:
            k_b = min(k_b, window)
        vhat = 0 if v.is_zero else v.residue(k_b)
        pka = p ** k_a
        pkb = p ** k_b
        alpha = math.exp(-t - mm * lp)
        beta = math.exp(t - mm * lp)
        col_s = (alpha * pka, beta * pka * (uf - vhat))
        col_r = (0.0, -beta * pkb)
        w1, w2, (u11, u12, u21, u22) = _gauss_reduce(col_s, col_r)
        det = abs(w1[0] * w2[1] - w1[1] * w2[0])
        if det == 0.0 or not math.isfinite(det):
            complete = False
            continue
        lim = mu * (1.0 + 1e-9)
        norm_w1 = math.hypot(*w1)
        c2max = int(norm_w1 * lim * 1.4142135623730951 / det) + 1
        for c2 in range(-c2max, c2max + 1):
            px, py = c2 * w2[0], c2 * w2[1]
            lo, hi = -math.inf, math.inf
            if abs(w1[0]) > 1e-300:
                a1, a2c = (-lim - px) / w1[0], (lim - px) / w1[0]
                lo, hi = min(a1, a2c), max(a1, a2c)
            if abs(w1[1]) > 1e-300:
                b1, b2c = (-lim - py) / w1[1], (lim - py) / w1[1]
                lo, hi = max(lo, min(b1, b2c)), min(hi, max(b1, b2c))
            if lo > hi:
                continue
            for c1 in range(math.ceil(lo) - 1, math.floor(hi) + 2):
                s = u11 * c1 + u12 * c2
                r = u21 * c1 + u22 * c2
                a = pka * s
                b = a * vhat + pkb * r
                if a == 0 and b == 0:
                    continue
                count += 1
                if count > max_candidates:
                    return best, best_abm, best_exact, False
                nrm, exact = space.eval(a, b, mm)
                if nrm < best:
                    best, best_abm, best_exact = nrm, (a, b, mm), exact
    return best, best_abm, best_exact, complete


def shortest_vector_norm(x: LatticePoint,
                         budget: Optional[SearchBudget] = None
                         ) -> ShortestVectorResult:
    """Shortest nonzero vector of the lattice of x, with a witness.

    The search is exact (true shortest) whenever it terminates within
    budget: the enumeration bounds per level exclude everything above the
    final norm.  A blown budget returns the best vector seen, flagged as
    an upper bound only.
    """
    budget = budget or SearchBudget()
    space = _VectorSpace(x)
    mu = budget.mu_start
    best_overall = None
    for _ in range(budget.max_passes):
        bnorm, babm, bexact, complete = _enumerate_below(
            space, mu, budget.max_candidates)
        if babm is not None and (best_overall is None
                                 or bnorm < best_overall[0]):
            best_overall = (bnorm, babm, bexact)
        if complete and babm is not None:
            vec = space.make_vector(*babm)
            return ShortestVectorResult(bnorm, vec, True)
        if complete:
            if mu >= budget.mu_max:
                break
            mu = min(mu * 2.0, budget.mu_max)
            continue
        if babm is not None:
            mu = bnorm * (1.0 + 1e-9)
            continue
        break
    if best_overall is None:
        # fall back on basic module elements so a bound always exists
        base = [(1, math.floor(space.ctx.ufloat)), (1, 0), (0, 1)]
        cands = [(a, b, mm) for a, b in base for mm in (-1, 0, 1, x.n)]
        best_overall = min(
            ((space.eval(a, b, mm)[0], (a, b, mm), space.eval(a, b, mm)[1])
             for a, b, mm in cands if (a, b) != (0, 0)),
            key=lambda z: z[0])
    nrm, abm, _ = best_overall
    return ShortestVectorResult(nrm, space.make_vector(*abm), False)


def shortest_below(x: LatticePoint, mu: float,
                   budget: Optional[SearchBudget] = None):
    """Best vector with norm < mu, or None; also reports completeness."""
    budget = budget or SearchBudget()
    space = _VectorSpace(x)
    bnorm, babm, bexact, complete = _enumerate_below(
        space, mu, budget.max_candidates)
    if babm is None or bnorm >= mu:
        return None, complete
    return space.make_vector(*babm), complete


def mahler_height(x: LatticePoint,
                  budget: Optional[SearchBudget] = None) -> float:
    """-log of the shortest vector norm (a lower bound if uncertified)."""
    res = shortest_vector_norm(x, budget)
    return -math.log(res.norm)


# ---------------------------------------------------------------------------
# cone orbit profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    t_max: float
    t_step: float = 0.25
    n_max: Optional[int] = None


@dataclass(frozen=True)
class ProfileCell:
    t: float
    n: int
    height: float
    certified: bool
    witness_q: str
    witness_q0: str


@dataclass(frozen=True)
class OrbitProfile:
    cone: str
    cells: tuple[ProfileCell, ...]

    @property
    def max_height(self) -> float:
        return max((c.height for c in self.cells if not math.isnan(c.height)),
                   default=math.nan)

    @property
    def argmax(self) -> Optional[tuple[float, int]]:
        best = None
        for c in self.cells:
            if not math.isnan(c.height) and (best is None
                                             or c.height > best[0]):
                best = (c.height, (c.t, c.n))
        return best[1] if best else None

    def escape_curve(self) -> list[tuple[float, float]]:
        """Running sup of height against the t horizon."""
        out = []
        sup = -math.inf
        for c in sorted(self.cells, key=lambda c: (c.t, c.n)):
            if not math.isnan(c.height):
                sup = max(sup, c.height)
            if out and out[-1][0] == c.t:
                out[-1] = (c.t, sup)
            else:
                out.append((c.t, sup))
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "n", "height", "certified", "witness_q",
                        "witness_q0"])
            for c in self.cells:
                w.writerow([repr(c.t), c.n, repr(c.height),
                            int(c.certified), c.witness_q, c.witness_q0])

    def to_json_dict(self) -> dict:
        am = self.argmax
        return {
            "schema": 1,
            "cone": self.cone,
            "n_cells": len(self.cells),
            "max_height": self.max_height,
            "argmax_t": am[0] if am else None,
            "argmax_n": am[1] if am else None,
            "all_certified": all(c.certified for c in self.cells),
        }


def cone_grid_points(cone: Cone, p: int, grid: GridSpec) -> list[ConePoint]:
    pts = []
    n_cap = grid.n_max
    if n_cap is None:
        n_cap = int(math.ceil(grid.t_max / math.log(p))) + 1
    steps = int(round(grid.t_max / grid.t_step))
    for i in range(steps + 1):
        t = i * grid.t_step
        for n in range(-n_cap, n_cap + 1):
            if cone.contains(t, n, p):
                pts.append(ConePoint(t, n))
    return pts


def cone_orbit_profile(x: LatticePoint, cone: Cone, grid: GridSpec,
                       budget: Optional[SearchBudget] = None) -> OrbitProfile:
    """Heights over the cone grid, with per-cell certification flags.

    Cells whose search signals (flow overflow, precision) are kept in the
    table with NaN height and certified=False rather than aborting the
    profile.
    """
    cone.validate(x.prime)
    cells = []
    for s in cone_grid_points(cone, x.prime, grid):
        try:
            res = shortest_vector_norm(apply_alpha(x, s), budget)
            cells.append(ProfileCell(s.t, s.n, -math.log(res.norm),
                                     res.certified, str(res.witness.q),
                                     str(res.witness.q0)))
        except (FlowRangeError, PrecisionError):
            cells.append(ProfileCell(s.t, s.n, math.nan, False, "", ""))
    return OrbitProfile(cone.name, tuple(cells))


# ---------------------------------------------------------------------------
# correspondence certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrespondenceVerdict:
    found: bool
    message: str
    delta: float
    delta_cubed: float
    t: Optional[float] = None
    n: Optional[int] = None
    norm: Optional[float] = None
    witness_q: Optional[int] = None
    witness_q0: Optional[int] = None
    product: Optional[float] = None
    product_ok: Optional[bool] = None
    integral: Optional[bool] = None

    def to_json_dict(self) -> dict:
        d = {"schema": 1}
        d.update(self.__dict__)
        return d


_WITNESS_MARGIN = 1.0 - 1e-7


def _zinvp_pshift(z: ZInvP, shift: int) -> ZInvP:
    """z * p^shift in canonical form."""
    if shift >= 0:
        return ZInvP.make(z.mantissa * z.prime ** shift, z.exponent, z.prime)
    return ZInvP.make(z.mantissa, z.exponent - shift, z.prime)


def _verdict_from_witness(u: UValue, v: PAdicApprox, p: int, s: ConePoint,
                          vec: LatticeVector, delta: float,
                          mt_flavor: bool) -> CorrespondenceVerdict:
    """Exact verification that a small vector yields a small product."""
    n = s.n
    d3 = Fraction(delta) ** 3
    # the proof-normalized pair: scale (q, q0) by p^n (cone C) or p^-n (C')
    shift = -n if mt_flavor else n
    Q = _zinvp_pshift(vec.q, shift)
    Q0 = _zinvp_pshift(vec.q0, shift)
    integral = Q.is_integer and Q0.is_integer
    if not integral:
        return CorrespondenceVerdict(
            True, "witness found but not integral (precision boundary)",
            delta, float(d3), s.t, n, vec.norm, None, None, None, None, False)
    qi, q0i = Q.as_int(), Q0.as_int()
    ctx = _UContext(Fraction(u) if isinstance(u, float) else u)
    if qi == 0:
        ok, prod_f = True, 0.0
    elif mt_flavor:
        # |Q| |Q|_p |Q u - Q0|: the discrete part is |Q| with p stripped
        qp_int = abs(qi) // p ** padic_valuation(qi, p)
        ok, prod_f = _exact_product_less(ctx, qp_int, qi, q0i, Fraction(1), d3)
    else:
        fac, _ = _qv_minus_q0_norm(v, qi, q0i)
        if fac == 0:
            ok, prod_f = True, 0.0
        else:
            ok, prod_f = _exact_product_less(ctx, abs(qi), qi, q0i, fac, d3)
    return CorrespondenceVerdict(
        True, "witness extracted and verified", delta, float(d3), s.t, n,
        vec.norm, qi, q0i, prod_f, ok, True)


def _exact_product_less(ctx: _UContext, scale: int, q: int, q0: int,
                        fac: Fraction, d3: Fraction) -> tuple[bool, float]:
    """Exactly decide scale * |q u - q0| * fac < d3; also return a float."""
    coeff = scale * fac
    if ctx.kind == "quad":
        uu = ctx.u
        surd = QuadIrr(uu.a * q - q0 * uu.c, uu.b * q, uu.c, uu.d).abs_value()
        ok = surd.cmp_rational(d3 / coeff) < 0
        prod = float(coeff) * float(surd)
        return ok, prod
    dist = ctx.dist_linear_exact(q, q0)
    val = coeff * dist
    return val < d3, float(val)


def correspondence_check_g(u: UValue, v: Union[PAdicApprox, int], p: int,
                           delta: float, grid: GridSpec,
                           budget: Optional[SearchBudget] = None
                           ) -> CorrespondenceVerdict:
    """Walk the expanding cone from x_{u,v} until a vector shorter than
    delta appears, then verify |q| |q u - q0| |q v - q0|_p < delta^3 with
    exact arithmetic on the extracted integer pair."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    x = lattice_point(u, v, p)
    cone = cone_g()
    complete = True
    for s in cone_grid_points(cone, p, grid):
        vec, cell_complete = shortest_below(apply_alpha(x, s),
                                            delta * _WITNESS_MARGIN, budget)
        complete = complete and cell_complete
        if vec is not None:
            return _verdict_from_witness(u, x.v, p, s, vec, delta, False)
    msg = "inconclusive at this horizon" if complete else \
        "inconclusive (budget-limited)"
    return CorrespondenceVerdict(False, msg, delta, delta ** 3)


def correspondence_check_mt(u: UValue, p: int, delta: float, grid: GridSpec,
                            budget: Optional[SearchBudget] = None
                            ) -> CorrespondenceVerdict:
    """Mirror check on the contracting cone: witnesses certify
    |q| |q|_p |q u - q0| < delta^3."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    x = lattice_point(u, 0, p)
    cone = cone_mt()
    complete = True
    for s in cone_grid_points(cone, p, grid):
        vec, cell_complete = shortest_below(apply_alpha(x, s),
                                            delta * _WITNESS_MARGIN, budget)
        complete = complete and cell_complete
        if vec is not None:
            return _verdict_from_witness(u, x.v, p, s, vec, delta, True)
    msg = "inconclusive at this horizon" if complete else \
        "inconclusive (budget-limited)"
    return CorrespondenceVerdict(False, msg, delta, delta ** 3)
