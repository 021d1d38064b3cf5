"""Diophantine product evaluation and record-minimum scans.

Four product flavors over positive integers q (with a companion integer
q0 in the two-parameter flavor), where <.> is distance to the nearest
integer and |.|_p, |.|_D are the (pseudo-)norms from the padic module:

    MT:          q * |q|_p * <q u>
    GMT:         |q| * |q u - q0| * |q v - q0|_p
    FURSTENBERG: q * |q|_p1 * |q|_p2 * <q u>
    DADIC:       q * |q|_D * <q u>

u may be a binary64 float, an exact Fraction, or an exact QuadIrr.  For
exact u every record is evaluated through exact integer arithmetic with a
cheap float pre-filter; any record value below 2^-20 is recomputed at high
precision before it is compared, so record ordering is protected exactly
where the products get scientifically interesting.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .contfrac import QuadIrr, _floor_quad, _surd_sign, quad_float
from .padic import (DSeq, PAdicApprox, PrecisionError, ZeroNormError,
                    check_prime, d_adic_norm, padic_norm, padic_valuation,
                    strip_prime)

UValue = Union[float, Fraction, QuadIrr]

_MAX_HORIZON = 1 << 62
_CHUNK = 1 << 18
_FILTER_EPS = 2.0 ** -48      # generous bound on relative float error of q*u
_EXACT_BELOW = 2.0 ** -20     # records below this are recomputed exactly
_REFINE_BITS = 160


class Flavor(str, Enum):
    MT = "mt"
    GMT = "gmt"
    FURSTENBERG = "furstenberg"
    DADIC = "dadic"


class ProductValue(float):
    """A float product value that may be only a certified upper bound.

    The upper-bound case arises when the p-adic factor vanishes at the
    working precision: the reported number uses the smallest norm the
    precision window can still certify.
    """

    is_upper_bound: bool = False

    def __new__(cls, value: float, is_upper_bound: bool = False):
        obj = super().__new__(cls, value)
        obj.is_upper_bound = is_upper_bound
        return obj


@dataclass(frozen=True)
class ProductQuery:
    """Everything a record scan needs, validated per flavor."""

    flavor: Flavor
    u: UValue
    q_max: int
    prime: Optional[int] = None
    prime2: Optional[int] = None
    v: Optional[PAdicApprox] = None
    dseq: Optional[DSeq] = None
    q0_min: int = 2
    q0_max: Optional[int] = None
    j_max: Optional[int] = None
    precision: str = "binary64"

    def __post_init__(self):
        if self.q_max < 1:
            raise ValueError("q_max must be at least 1")
        if self.q_max > _MAX_HORIZON:
            raise OverflowError(
                f"scan horizon {self.q_max} exceeds the supported "
                f"integer width (2^62)")
        if self.precision not in ("binary64", "extended"):
            raise ValueError(f"unknown precision mode {self.precision!r}")
        f = self.flavor
        if f in (Flavor.MT, Flavor.GMT):
            if self.prime is None:
                raise ValueError(f"{f.value} flavor needs a prime")
            check_prime(self.prime)
        if f == Flavor.FURSTENBERG:
            if self.prime is None or self.prime2 is None:
                raise ValueError("furstenberg flavor needs two primes")
            check_prime(self.prime)
            check_prime(self.prime2)
            if self.prime == self.prime2:
                raise ValueError("the two primes must be distinct")
        if f == Flavor.GMT:
            if self.v is None:
                raise ValueError("gmt flavor needs a p-adic value v")
            if self.v.prime != self.prime:
                raise ValueError("v lives over a different prime")
            if self.q0_min < 0:
                raise ValueError("q0_min must be non-negative")
        if f == Flavor.DADIC and self.dseq is None:
            raise ValueError("dadic flavor needs a divisibility chain")


class Record(NamedTuple):
    q: int
    q0: Optional[int]
    value: float
    exact: bool = True


@dataclass(frozen=True)
class RecordSequence:
    """Strictly decreasing sequence of record minima over q = 1..horizon."""

    flavor: str
    horizon: int
    records: tuple[Record, ...]

    @property
    def min_value(self) -> float:
        return self.records[-1].value if self.records else math.inf

    @property
    def argmin(self) -> Optional[Record]:
        return self.records[-1] if self.records else None

    def validate(self) -> None:
        last_v = math.inf
        last_q = 0
        for r in self.records:
            if not r.value < last_v:
                raise AssertionError("record values must strictly decrease")
            if not r.q > last_q:
                raise AssertionError("record q must strictly increase")
            last_v, last_q = r.value, r.q

    def csv_rows(self) -> list[tuple[str, str, str, str]]:
        rows = []
        for r in self.records:
            lg = "-inf" if r.value == 0.0 else repr(math.log10(r.value))
            rows.append((str(r.q), "" if r.q0 is None else str(r.q0),
                         repr(r.value), lg))
        return rows

    def write_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "q0", "value", "log10_value"])
            w.writerows(self.csv_rows())

    def to_json_dict(self) -> dict:
        d = {
            "schema": 1,
            "flavor": self.flavor,
            "horizon": self.horizon,
            "n_records": len(self.records),
            "min_value": self.min_value if self.records else None,
        }
        if self.records:
            last = self.records[-1]
            d["argmin_q"] = last.q
            d["argmin_q0"] = last.q0
            d["all_exact"] = all(r.exact for r in self.records)
        return d


def merge_record_lists(parts: Sequence[Sequence[Record]]) -> list[Record]:
    """Fold per-range record lists (in q order) into one strict sequence.

    The fold is associative and deterministic, which is what lets workers
    scan disjoint q ranges independently.
    """
    out: list[Record] = []
    mv = math.inf
    for part in parts:
        for rec in part:
            if rec.value < mv:
                out.append(rec)
                mv = rec.value
    return out


# ---------------------------------------------------------------------------
# evaluation contexts for the three kinds of u
# ---------------------------------------------------------------------------

class _UContext:
    """Per-u-type evaluation helpers shared by products and scans."""

    def __init__(self, u: UValue, precision: str = "binary64"):
        if isinstance(u, float) and precision == "extended":
            u = Fraction(u)  # exact: binary64 values are dyadic rationals
        if isinstance(u, bool):
            raise TypeError("u must be a number")
        if isinstance(u, int):
            u = Fraction(u)
        self.u = u
        if isinstance(u, QuadIrr):
            self.kind = "quad"
            self.ufloat = float(u)
        elif isinstance(u, Fraction):
            self.kind = "frac"
            self.ufloat = float(u)
        elif isinstance(u, float):
            self.kind = "float"
            self.ufloat = u
        else:
            raise TypeError(f"unsupported u type {type(u).__name__}")

    # -- <q u> -------------------------------------------------------------

    def dist_value(self, q: int, qweight: int) -> float:
        """qweight * <q u> with the exactness policy of the module."""
        if self.kind == "float":
            x = q * self.ufloat
            if abs(x) >= 2.0 ** 52:
                raise PrecisionError(
                    "q*u has no fractional bits left in binary64; "
                    "use the extended precision mode")
            f = x % 1.0
            d = f if f <= 0.5 else 1.0 - f
            return qweight * d
        if self.kind == "frac":
            na, nb = self.u.numerator, self.u.denominator
            r = (q * na) % nb
            r = min(r, nb - r)
            if r == 0:
                return 0.0
            return qweight * r / nb
        # quad
        uu = self.u
        A, B = uu.a * q, uu.b * q
        m = _nearest_quad(A, B, uu.c, uu.d)
        val = qweight * abs(quad_float(A - m * uu.c, B, uu.c, uu.d))
        if 0.0 < val < _EXACT_BELOW:
            val = float(qweight * _quad_abs_bits(A - m * uu.c, B, uu.c, uu.d))
        return val

    def dist_linear(self, q: int, q0: int) -> float:
        """|q u - q0| under the same policy."""
        if self.kind == "float":
            x = q * self.ufloat
            if abs(x) >= 2.0 ** 52:
                raise PrecisionError(
                    "q*u has no fractional bits left in binary64; "
                    "use the extended precision mode")
            return abs(x - q0)
        if self.kind == "frac":
            na, nb = self.u.numerator, self.u.denominator
            num = abs(q * na - q0 * nb)
            return num / nb
        uu = self.u
        X, Y = uu.a * q - q0 * uu.c, uu.b * q
        val = abs(quad_float(X, Y, uu.c, uu.d))
        if 0.0 < val < _EXACT_BELOW:
            val = float(_quad_abs_bits(X, Y, uu.c, uu.d))
        return val

    def dist_linear_exact(self, q: int, q0: int) -> Union[Fraction, QuadIrr]:
        """|q u - q0| as an exact value (Fraction, or QuadIrr surd)."""
        if self.kind == "quad":
            uu = self.u
            return QuadIrr(uu.a * q - q0 * uu.c, uu.b * q, uu.c, uu.d).abs_value()
        fr = Fraction(self.u) if self.kind == "float" else self.u
        return abs(q * fr - q0)


def _nearest_quad(A: int, B: int, c: int, d: int) -> int:
    """Nearest integer to (A + B*sqrt(d))/c, exactly."""
    f0 = _floor_quad(A, B, c, d)
    # fractional part >= 1/2  <=>  2*(value - f0) - 1 > 0
    if _surd_sign(2 * (A - f0 * c) - c, 2 * B, d) > 0:
        return f0 + 1
    return f0


def _quad_abs_bits(X: int, Y: int, c: int, d: int,
                   bits: int = _REFINE_BITS) -> Fraction:
    """|X + Y*sqrt(d)| / c as a Fraction with absolute error < 2^(1-bits)."""
    s = math.isqrt(Y * Y * d << (2 * bits))
    T = (X << bits) + (s if Y > 0 else -(s + 1))
    return Fraction(abs(T), c << bits)


# ---------------------------------------------------------------------------
# single products
# ---------------------------------------------------------------------------

def mt_product(u: UValue, q: int, p: int, precision: str = "binary64") -> float:
    """q * |q|_p * <q u> for a positive integer q."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    qp, _ = strip_prime(q, p)
    return _UContext(u, precision).dist_value(q, qp)


def furstenberg_product(u: UValue, q: int, p1: int, p2: int,
                        precision: str = "binary64") -> float:
    """q * |q|_p1 * |q|_p2 * <q u> for distinct primes p1, p2."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    if p1 == p2:
        raise ValueError("the two primes must be distinct")
    qp, _ = strip_prime(q, p1)
    qp, _ = strip_prime(qp, p2)
    return _UContext(u, precision).dist_value(q, qp)


def dadic_product(u: UValue, q: int, dseq: DSeq,
                  precision: str = "binary64") -> float:
    """q * |q|_D * <q u> for a divisibility chain D."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    w = d_adic_norm(q, dseq)  # 1/r with r | q
    return _UContext(u, precision).dist_value(q, q // w.denominator)


def _norm_frac(p: int, t: int) -> Fraction:
    return Fraction(1, p ** t) if t >= 0 else Fraction(p ** (-t))


def _qv_minus_q0_norm(v: PAdicApprox, q: int, q0: int) -> tuple[Fraction, bool]:
    """(|q v - q0|_p, exact?) from the finite-precision digits of v.

    Zero factors are reported as Fraction(0) (the product evaluators map
    that to a zero product).  When every digit in the knowledge window
    cancels, the norm is only bounded: the certified upper bound is
    returned with exact=False.
    """
    p = v.prime
    if q == 0 or v.is_zero:
        # q*v = 0 exactly, so q*v - q0 = -q0
        if q0 == 0:
            return Fraction(0), True
        return padic_norm(q0, p), True
    w = v.valuation
    vq = padic_valuation(q, p)
    if w >= 0:
        cap = w + vq + v.precision           # q*v is known mod p^cap
        R = (q * v.unit_int() * p ** w - q0) % p ** cap
        if R == 0:
            return Fraction(1, p ** cap), False
        return _norm_frac(p, padic_valuation(R, p)), True
    # w < 0: q v - q0 = p^w (q U - q0 p^{-w}); the inner integer is known
    # mod p^window with window = vq + precision
    window = vq + v.precision
    R = (q * v.unit_int() - q0 * p ** (-w)) % p ** window
    if R == 0:
        return _norm_frac(p, w + window), False
    return _norm_frac(p, w + padic_valuation(R, p)), True


def gmt_product(u: UValue, v: PAdicApprox, q: int, q0: int,
                precision: str = "binary64") -> ProductValue:
    """|q| * |q u - q0| * |q v - q0|_p.

    If the p-adic factor vanishes at working precision the returned value
    uses the certified upper bound for that factor and is flagged.
    """
    if q == 0 and q0 == 0:
        raise ValueError("(q, q0) = (0, 0) is excluded")
    fac, exact = _qv_minus_q0_norm(v, q, q0)
    if fac == 0 or q == 0:
        return ProductValue(0.0)
    real = _UContext(u, precision).dist_linear(q, q0)
    return ProductValue(abs(q) * real * float(fac), is_upper_bound=not exact)


# ---------------------------------------------------------------------------
# record scans: MT / FURSTENBERG / DADIC share one core
# ---------------------------------------------------------------------------

def _weight_fn(query: ProductQuery) -> Callable[[int], int]:
    """Map q to the exact integer q * (discrete norm factors)."""
    f = query.flavor
    if f == Flavor.MT:
        p = query.prime
        return lambda q: strip_prime(q, p)[0]
    if f == Flavor.FURSTENBERG:
        p1, p2 = query.prime, query.prime2
        return lambda q: strip_prime(strip_prime(q, p1)[0], p2)[0]
    if f == Flavor.DADIC:
        dseq = query.dseq
        def wf(q: int) -> int:
            return q // d_adic_norm(q, dseq).denominator
        return wf
    raise ValueError(f"no simple weight for flavor {f}")


def _weights_np(query: ProductQuery, qs: np.ndarray) -> np.ndarray:
    f = query.flavor
    if f == Flavor.MT:
        return _strip_np(qs, query.prime)
    if f == Flavor.FURSTENBERG:
        return _strip_np(_strip_np(qs, query.prime), query.prime2)
    if f == Flavor.DADIC:
        out = qs.copy()
        r = 1
        qmax = int(qs[-1])
        for dd in query.dseq.ratio_iter():
            r *= dd
            if r > qmax:
                break
            mask = (qs % r) == 0
            if not mask.any():
                break
            out[mask] = qs[mask] // r
        return out
    raise ValueError(f"no numpy weights for flavor {f}")


def _strip_np(qs: np.ndarray, p: int) -> np.ndarray:
    out = qs.copy()
    while True:
        mask = (out % p) == 0
        if not mask.any():
            return out
        out[mask] //= p


def _scan_range_exact(ctx: _UContext, wf, start: int, stop: int,
                      gmin: float) -> list[Record]:
    """Exact-u scan over [start, stop) with a float pre-filter."""
    recs: list[Record] = []
    mv = gmin
    uf = ctx.ufloat
    for q in range(start, stop):
        qp = wf(q)
        x = q * uf
        f = x % 1.0
        dist = f if f <= 0.5 else 1.0 - f
        if qp * dist - qp * (abs(x) + 1.0) * _FILTER_EPS >= mv:
            continue
        val = ctx.dist_value(q, qp)
        if val < mv:
            recs.append(Record(q, None, val))
            mv = val
            if val == 0.0:
                break
    return recs


def _scan_range_float(ctx: _UContext, query: ProductQuery, start: int,
                      stop: int, gmin: float) -> list[Record]:
    """Vectorized binary64 scan over [start, stop) for float u."""
    if (stop - 1) * abs(ctx.ufloat) >= 2.0 ** 52:
        raise PrecisionError(
            "q*u has no fractional bits left in binary64; "
            "use the extended precision mode")
    qs = np.arange(start, stop, dtype=np.int64)
    w = _weights_np(query, qs)
    x = qs * ctx.ufloat
    f = x % 1.0
    d = np.minimum(f, 1.0 - f)
    vals = w * d
    prefix = np.minimum.accumulate(np.concatenate(([gmin], vals)))[:-1]
    idx = np.nonzero(vals < prefix)[0]
    recs: list[Record] = []
    mv = gmin
    for i in idx:
        val = float(vals[i])
        if val < mv:
            if 0.0 < val < _EXACT_BELOW:
                # recompute exactly on the dyadic rational u
                exact_ctx = _UContext(Fraction(ctx.ufloat))
                val = exact_ctx.dist_value(int(qs[i]), int(w[i]))
                if not val < mv:
                    continue
            recs.append(Record(int(qs[i]), None, val))
            mv = val
            if val == 0.0:
                break
    return recs


def _run_simple_scan(query: ProductQuery, threads: int = 1) -> RecordSequence:
    ctx = _UContext(query.u, query.precision)
    wf = None if ctx.kind == "float" else _weight_fn(query)

    def scan_range(start, stop, gmin):
        if ctx.kind == "float":
            return _scan_range_float(ctx, query, start, stop, gmin)
        return _scan_range_exact(ctx, wf, start, stop, gmin)

    ranges = [(s, min(s + _CHUNK, query.q_max + 1))
              for s in range(1, query.q_max + 1, _CHUNK)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: scan_range(*r, math.inf), ranges))
        records = merge_record_lists(parts)
    else:
        records = []
        mv = math.inf
        for start, stop in ranges:
            part = scan_range(start, stop, mv)
            records.extend(part)
            if part:
                mv = part[-1].value
            if records and records[-1].value == 0.0:
                break
    return RecordSequence(query.flavor.value, query.q_max, tuple(records))


def mt_record_scan(query: ProductQuery, threads: int = 1) -> RecordSequence:
    """Record minima of the MT product over q = 1..q_max."""
    if query.flavor != Flavor.MT:
        raise ValueError("query flavor must be MT")
    return _run_simple_scan(query, threads)


def furstenberg_record_scan(query: ProductQuery, threads: int = 1) -> RecordSequence:
    """Record minima of the two-prime product over q = 1..q_max."""
    if query.flavor != Flavor.FURSTENBERG:
        raise ValueError("query flavor must be FURSTENBERG")
    return _run_simple_scan(query, threads)


def dadic_record_scan(query: ProductQuery, threads: int = 1) -> RecordSequence:
    """Record minima of the D-adic product over q = 1..q_max.

    With the geometric chain {p^n} this agrees with mt_record_scan
    record for record.
    """
    if query.flavor != Flavor.DADIC:
        raise ValueError("query flavor must be DADIC")
    return _run_simple_scan(query, threads)


# ---------------------------------------------------------------------------
# GMT scan with the q0 candidate ladder
# ---------------------------------------------------------------------------

def _gmt_candidates(query: ProductQuery, ctx: _UContext, q: int) -> list[int]:
    """Candidate q0 values for one q: nearest integers to q*u plus, for
    each ladder level j, the nearest members of the residue class
    q0 = q*v (mod p^j), clamped into the configured q0 window.

    Completeness over a finite q0 box is exact (checked against the
    double-loop oracle in the tests); without a box the ladder is a
    documented heuristic whose depth covers every class that can still
    produce a competitive record.
    """
    p = query.prime
    v = query.v
    q0_min, q0_max = query.q0_min, query.q0_max
    qu = q * ctx.ufloat
    out: set[int] = set()

    def push(q0: int):
        if abs(q0) < q0_min:
            return
        if q0_max is not None and abs(q0) > q0_max:
            return
        out.add(q0)

    base = math.floor(qu)
    for cand in (base, base + 1):
        push(cand)

    # valuation data of q*v, to know whether residues exist at all
    if v.is_zero:
        lead = None  # residue of q*v is 0 at every level
    else:
        lead = v.valuation + padic_valuation(q, p)
        if lead < 0:
            # |q v| > 1 p-adically: no integer q0 matches even mod p
            return sorted(out)

    span = 2.0 * (abs(qu) + q0_min + 2.0)
    j_stop = 1
    pj = p
    while pj <= span:
        pj *= p
        j_stop += 1
    if not v.is_zero:
        j_stop = min(j_stop, v.known_exponent() + padic_valuation(q, p))

    pj = 1
    for j in range(1, j_stop + 1):
        pj *= p
        r = 0 if v.is_zero else (q * v.unit_int() * p ** v.valuation) % pj
        k = math.floor((qu - r) / pj)
        for kk in (k, k + 1):
            push(r + kk * pj)
        # nearest class members at or beyond the |q0| >= q0_min floor
        push(r + pj * math.ceil((q0_min - r) / pj))
        push(r + pj * math.floor((-q0_min - r) / pj))
        if q0_max is not None:
            push(r + pj * math.floor((q0_max - r) / pj))
            push(r + pj * math.ceil((-q0_max - r) / pj))
    return sorted(out)


def _gmt_eval(query: ProductQuery, ctx: _UContext, q: int,
              q0: int) -> tuple[float, bool]:
    fac, exact = _qv_minus_q0_norm(query.v, q, q0)
    if fac == 0:
        return 0.0, True
    real = ctx.dist_linear(q, q0)
    return q * real * float(fac), exact


def _gmt_scan_range(query: ProductQuery, ctx: _UContext, start: int,
                    stop: int, gmin: float) -> list[Record]:
    recs: list[Record] = []
    mv = gmin
    for q in range(start, stop):
        best_val, best_q0, best_exact = math.inf, None, True
        for q0 in _gmt_candidates(query, ctx, q):
            val, exact = _gmt_eval(query, ctx, q, q0)
            if val < best_val:
                best_val, best_q0, best_exact = val, q0, exact
        if best_q0 is not None and best_val < mv:
            recs.append(Record(q, best_q0, best_val, best_exact))
            mv = best_val
            if best_val == 0.0:
                break
    return recs


def _gmt_scan_vzero_fast(query: ProductQuery, threads: int = 1) -> RecordSequence:
    """Vectorized v = 0 scan: approximate stream with exact re-verification.

    For v = 0 the ladder classes are the multiples of p^j, which makes the
    per-level minimum a vector operation.  Candidate record positions are
    over-extracted with an error-bound slack and re-evaluated exactly.
    """
    ctx = _UContext(query.u, query.precision)
    p = query.prime
    uf = abs(ctx.ufloat)
    records: list[Record] = []
    mv = math.inf
    for start in range(1, query.q_max + 1, _CHUNK):
        stop = min(start + _CHUNK, query.q_max + 1)
        qs = np.arange(start, stop, dtype=np.float64)
        qu = qs * ctx.ufloat
        span = 2.0 * (abs(qu[-1]) + query.q0_min + 2.0)
        vals = np.full(qs.shape, np.inf)
        pj = 1.0
        j = 0
        kmin0 = float(query.q0_min)
        while pj <= span or j == 0:
            k = np.rint(qu / pj)
            kmin = math.ceil(kmin0 / pj)
            for kk in (k, k + 1, k - 1):
                kkc = np.where(np.abs(kk) < kmin,
                               np.where(qu >= 0, kmin, -kmin), kk)
                q0 = kkc * pj
                cand = qs * np.abs(qu - q0) / pj
                if query.q0_max is not None:
                    cand = np.where(np.abs(q0) > query.q0_max, np.inf, cand)
                vals = np.minimum(vals, cand)
            pj *= p
            j += 1
        slack = qs * qs * uf * 2.0 ** -50 + 2.0 ** -300
        prefix = np.minimum.accumulate(np.concatenate(([mv], vals)))[:-1]
        idx = np.nonzero(vals < prefix + slack)[0]
        for i in idx:
            q = int(start + i)
            best_val, best_q0, best_exact = math.inf, None, True
            for q0 in _gmt_candidates(query, ctx, q):
                val, exact = _gmt_eval(query, ctx, q, q0)
                if val < best_val:
                    best_val, best_q0, best_exact = val, q0, exact
            if best_q0 is not None and best_val < mv:
                records.append(Record(q, best_q0, best_val, best_exact))
                mv = best_val
                if best_val == 0.0:
                    break
        if records and records[-1].value == 0.0:
            break
    return RecordSequence(query.flavor.value, query.q_max, tuple(records))


def gmt_record_scan(query: ProductQuery, threads: int = 1) -> RecordSequence:
    """Record minima of |q| |q u - q0| |q v - q0|_p over the q0 ladder.

    The liminf side condition q0 -> infinity is honored by the configured
    floor q0_min (default 2); records report their q0 so results can be
    filtered after the fact.
    """
    if query.flavor != Flavor.GMT:
        raise ValueError("query flavor must be GMT")
    if query.v.is_zero and query.q_max >= 50000 and query.precision == "binary64":
        return _gmt_scan_vzero_fast(query, threads)
    ctx = _UContext(query.u, query.precision)
    ranges = [(s, min(s + _CHUNK, query.q_max + 1))
              for s in range(1, query.q_max + 1, _CHUNK)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda r: _gmt_scan_range(query, ctx, *r, math.inf), ranges))
        records = merge_record_lists(parts)
    else:
        records = []
        mv = math.inf
        for start, stop in ranges:
            part = _gmt_scan_range(query, ctx, start, stop, mv)
            records.extend(part)
            if part:
                mv = part[-1].value
            if records and records[-1].value == 0.0:
                break
    return RecordSequence(query.flavor.value, query.q_max, tuple(records))


# ---------------------------------------------------------------------------
# algebraic identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionVerdict:
    """Outcome of the ratio dichotomy behind the parameter swap.

    When |q/u| >= 2|q0|, the product |q0| * |q/u - q0| * |q|_p is at least
    1/(2|u|) for every prime (using |q|_p >= 1/|q|), so small products force
    the other branch.  `product_lower` reports the worst-case-p value
    |q0| * |q/u - q0| / |q|.
    """

    branch: str
    product_lower: float
    bound: float
    margin: float
    holds: bool


def reduction_check(u: UValue, q: int, q0: int) -> ReductionVerdict:
    """Verify the dichotomy above for one triple; exact in all comparisons."""
    if q == 0:
        raise ValueError("q must be nonzero")
    if q0 == 0:
        raise ValueError("q0 must be nonzero")
    if isinstance(u, float):
        u = Fraction(u)
    if isinstance(u, Fraction):
        if u == 0:
            raise ValueError("u must be nonzero")
        ratio_large = abs(Fraction(q) / u) >= 2 * abs(q0)
        lhs = abs(q0) * abs(Fraction(q) / u - q0) / abs(q)
        bound = 1 / (2 * abs(u))
        lhs_f, bound_f = float(lhs), float(bound)
        if ratio_large:
            return ReductionVerdict("ratio_at_least_2q0", lhs_f, bound_f,
                                    lhs_f - bound_f, lhs >= bound)
        return ReductionVerdict("ratio_below_2q0", lhs_f, bound_f,
                                lhs_f - bound_f, True)
    if isinstance(u, QuadIrr):
        qu_inv = u.reciprocal().scale(q)            # q / u
        ratio_large = qu_inv.abs_value().cmp_rational(2 * abs(q0)) >= 0
        diff = (qu_inv - q0).abs_value()            # |q/u - q0|
        # lhs >= bound  <=>  2 |q0| |q/u - q0| |u| >= |q|
        #               <=>  2 |q0| |q - q0 u| >= |q|
        lhs_cmp = (u.scale(-q0) + q).abs_value().scale(2 * abs(q0))
        holds_exact = lhs_cmp.cmp_rational(abs(q)) >= 0
        lhs_f = abs(q0) * float(diff) / abs(q)
        bound_f = 1.0 / (2.0 * abs(float(u)))
        if ratio_large:
            return ReductionVerdict("ratio_at_least_2q0", lhs_f, bound_f,
                                    lhs_f - bound_f, holds_exact)
        return ReductionVerdict("ratio_below_2q0", lhs_f, bound_f,
                                lhs_f - bound_f, True)
    raise TypeError(f"unsupported u type {type(u).__name__}")


@dataclass(frozen=True)
class InvarianceCheck:
    lhs: float
    rhs: float
    difference: float


def f_delta_invariance_check(u: UValue, q: int, p1: int,
                             p2: int) -> InvarianceCheck:
    """Exact scaling identity behind multiplying u by p1.

    Compares q |q|_p1 |q|_p2 <q (p1 u)> against
    (q p1) |q p1|_p1 |q p1|_p2 <(q p1) u>.  The discrete prefactors are
    handled exactly and the two distance arguments are the same exact
    number, so the difference only measures arithmetic consistency.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if p1 == p2:
        raise ValueError("the two primes must be distinct")
    if isinstance(u, float):
        u = Fraction(u)
    if isinstance(u, QuadIrr):
        u_scaled = u.scale(p1)
        ctx_l = _UContext(u_scaled)
        ctx_r = _UContext(u)
    else:
        u = Fraction(u)
        ctx_l = _UContext(u * p1)
        ctx_r = _UContext(u)
    wl = strip_prime(strip_prime(q, p1)[0], p2)[0]
    lhs = ctx_l.dist_value(q, wl)
    wr = strip_prime(strip_prime(q * p1, p1)[0], p2)[0]
    rhs = ctx_r.dist_value(q * p1, wr)
    return InvarianceCheck(lhs, rhs, lhs - rhs)
