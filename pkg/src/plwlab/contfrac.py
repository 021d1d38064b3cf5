"""Continued fractions for rationals and quadratic irrationals.

Everything runs on exact integer arithmetic: floors of surds go through
integer square roots, the Gauss map is iterated on exact (a + b*sqrt(d))/c
states, and eventual periodicity is detected by exact state repetition.
No floating point enters any expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Union

from .padic import strip_prime


class NotIrrationalError(ValueError):
    """The requested value is rational, so no quadratic surd exists."""


def _surd_sign(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d) for integer a, b and non-square d > 0."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a >= 0 and b > 0:
        return 1
    if a <= 0 and b < 0:
        return -1
    if a > 0:  # b < 0
        return 1 if a * a > b * b * d else -1
    return -1 if a * a > b * b * d else 1


def _floor_quad(a: int, b: int, c: int, d: int) -> int:
    """floor((a + b*sqrt(d))/c) for c > 0, d > 0 not a perfect square."""
    if b == 0:
        return a // c
    s = math.isqrt(b * b * d)
    # floor(b*sqrt(d)) is s for b > 0; for b < 0 the surd is irrational,
    # so the floor of the negative value is -(s+1).
    n = s if b > 0 else -s - 1
    return (a + n) // c


@dataclass(frozen=True)
class QuadIrr:
    """Exact quadratic irrational (a + b*sqrt(d))/c.

    Normalized so that d is square-free, c > 0, and gcd(a, b, c) = 1.
    Construction rejects rational values (b = 0, or d a perfect square).
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if c == 0:
            raise ValueError("denominator c must be nonzero")
        if d <= 0:
            raise ValueError("radicand d must be positive")
        if b == 0:
            raise NotIrrationalError("b = 0 gives a rational value")
        # pull square factors out of d
        f = 1
        k = 2
        while k * k <= d:
            while d % (k * k) == 0:
                d //= k * k
                f *= k
            k += 1
        b *= f
        if d == 1:
            raise NotIrrationalError("d is a perfect square; value is rational")
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(abs(a), abs(b)), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "d", d)

    # -- constructors --------------------------------------------------

    @classmethod
    def sqrt(cls, d: int) -> "QuadIrr":
        return cls(0, 1, 1, d)

    @classmethod
    def golden(cls) -> "QuadIrr":
        return cls(1, 1, 2, 5)

    # -- exact queries ---------------------------------------------------

    def floor(self) -> int:
        return _floor_quad(self.a, self.b, self.c, self.d)

    def sign(self) -> int:
        """Exact sign of the value."""
        return _surd_sign(self.a, self.b, self.d)

    def _cmp(self, other) -> int:
        if isinstance(other, (int, Fraction)):
            return self.cmp_rational(other)
        if isinstance(other, QuadIrr):
            if other.d != self.d:
                raise ValueError("cannot compare surds with different radicands")
            a = self.a * other.c - other.a * self.c
            b = self.b * other.c - other.b * self.c
            return _surd_sign(a, b, self.d)
        raise TypeError(f"cannot compare QuadIrr with {type(other).__name__}")

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def cmp_rational(self, r: Union[int, Fraction]) -> int:
        """Exact comparison against a rational: -1 or 1 (never equal)."""
        r = Fraction(r)
        # (a + b sqrt(d))/c vs n/m  <=>  sign(m*a - n*c + m*b*sqrt(d))
        return _surd_sign(r.denominator * self.a - r.numerator * self.c,
                          r.denominator * self.b, self.d)

    # -- exact arithmetic ----------------------------------------------

    def __neg__(self) -> "QuadIrr":
        return QuadIrr(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        if isinstance(other, int):
            return QuadIrr(self.a - other * self.c, self.b, self.c, self.d)
        if isinstance(other, Fraction):
            return QuadIrr(self.a * other.denominator - other.numerator * self.c,
                           self.b * other.denominator,
                           self.c * other.denominator, self.d)
        if isinstance(other, QuadIrr):
            if other.d != self.d:
                raise ValueError("mixed radicands")
            a = self.a * other.c - other.a * self.c
            b = self.b * other.c - other.b * self.c
            if b == 0:
                raise NotIrrationalError("difference is rational")
            return QuadIrr(a, b, self.c * other.c, self.d)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self - (-other)
        return NotImplemented

    __radd__ = __add__

    def scale(self, r: Union[int, Fraction]) -> "QuadIrr":
        """Multiply by a nonzero rational."""
        r = Fraction(r)
        if r == 0:
            raise ValueError("scaling by zero gives a rational")
        return QuadIrr(self.a * r.numerator, self.b * r.numerator,
                       self.c * r.denominator, self.d)

    def reciprocal(self) -> "QuadIrr":
        nrm = self.a * self.a - self.b * self.b * self.d  # never 0: surd
        return QuadIrr(self.a * self.c, -self.b * self.c, nrm, self.d)

    def conjugate(self) -> "QuadIrr":
        return QuadIrr(self.a, -self.b, self.c, self.d)

    def abs_value(self) -> "QuadIrr":
        return -self if self.sign() < 0 else self

    # -- conversions -----------------------------------------------------

    def __float__(self) -> float:
        return quad_float(self.a, self.b, self.c, self.d)

    def nearest_int(self) -> int:
        """Nearest integer (exact tie handling is moot: the value is irrational)."""
        f = self.floor()
        # compare value - f with 1/2 exactly
        twice = QuadIrr(2 * self.a - (2 * f + 1) * self.c, 2 * self.b,
                        self.c, self.d)
        return f + 1 if twice.sign() > 0 else f

    def dist_nearest_int(self) -> "QuadIrr":
        """Exact distance to the nearest integer as a QuadIrr."""
        return (self - self.nearest_int()).abs_value()

    def __str__(self) -> str:
        return f"({self.a}+{self.b}*sqrt({self.d}))/{self.c}"


def quad_float(a: int, b: int, c: int, d: int) -> float:
    """(a + b*sqrt(d))/c in binary64, stable under cancellation.

    When a and b*sqrt(d) have opposite signs the direct formula loses
    precision, so the conjugate form (a^2 - b^2 d)/(c (a - b sqrt(d)))
    is used instead.
    """
    sd = math.sqrt(d)
    if a == 0 or (a > 0) == (b > 0):
        return (a + b * sd) / c
    num = a * a - b * b * d
    den = c * (a - b * sd)
    return num / den


@dataclass(frozen=True)
class CFExpansion:
    """Continued fraction digits: finite preperiod plus repeating period.

    The period is empty exactly when the input was rational (finite
    expansion, canonical form with last quotient >= 2).
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...] = ()
    exact: bool = True

    @property
    def is_periodic(self) -> bool:
        return bool(self.period)

    def digit_stream(self) -> Iterator[int]:
        yield from self.preperiod
        while self.period:
            yield from self.period

    def digits(self, count: int) -> list[int]:
        out = []
        for a in self.digit_stream():
            if len(out) >= count:
                break
            out.append(a)
        return out

    def convergents(self, count: int) -> Iterator[tuple[int, int]]:
        """First `count` convergents (h_n, k_n) with h_n/k_n -> value."""
        h0, h1 = 1, 0
        k0, k1 = 0, 1
        for i, a in enumerate(self.digit_stream()):
            if i >= count:
                return
            h0, h1 = a * h0 + h1, h0
            k0, k1 = a * k0 + k1, k0
            yield h0, k0


def cf_expand(u: Union[int, Fraction, QuadIrr], max_steps: int = 100000) -> CFExpansion:
    """Expand a rational or quadratic irrational into its continued fraction.

    Rationals get the canonical finite form (last quotient >= 2 when the
    expansion has more than one digit).  Quadratic surds are iterated under
    the exact Gauss map until the state repeats, which is guaranteed to
    happen; `max_steps` is only an internal safety net.
    """
    if isinstance(u, (int, Fraction)):
        return _cf_rational(Fraction(u))
    if not isinstance(u, QuadIrr):
        raise TypeError(f"need a Fraction or QuadIrr, got {type(u).__name__}")

    digits: list[int] = []
    seen: dict[tuple[int, int, int], int] = {}
    x = u
    for _ in range(max_steps):
        key = (x.a, x.b, x.c)
        if key in seen:
            i = seen[key]
            return CFExpansion(tuple(digits[:i]), tuple(digits[i:]))
        seen[key] = len(digits)
        a = x.floor()
        digits.append(a)
        x = (x - a).reciprocal()
    raise RuntimeError("Gauss map failed to cycle within the safety bound")


def _cf_rational(u: Fraction) -> CFExpansion:
    num, den = u.numerator, u.denominator
    digits = []
    while den:
        a, r = divmod(num, den)
        digits.append(a)
        num, den = den, r
    if len(digits) > 1 and digits[-1] == 1:
        digits.pop()
        digits[-1] += 1
    return CFExpansion(tuple(digits))


class QuotientSup(NamedTuple):
    """Largest partial quotient seen, with where it occurred."""
    value: int
    k: int          # which prime-power multiple p^k * u
    position: int   # digit index within that expansion (1 = first tail digit)


def scaled_quotient_sup(u: QuadIrr, p: int, k_max: int, len_max: int) -> QuotientSup:
    """Sup of CF partial quotients of p^k * u over k = 0..k_max.

    Looks at the first `len_max` tail quotients (indices 1..len_max; the
    integer part a_0 is skipped since it grows like p^k regardless of the
    approximation behaviour).  Unboundedness of this sup as both budgets
    grow is the classical criterion for the product liminf hitting zero;
    a finite run only reports the observed horizon sup and its location.
    """
    if k_max < 0 or len_max < 1:
        raise ValueError("k_max >= 0 and len_max >= 1 required")
    best = QuotientSup(0, -1, -1)
    for k in range(k_max + 1):
        exp = cf_expand(u.scale(p ** k))
        for i, a in enumerate(exp.digits(len_max + 1)):
            if i == 0:
                continue
            if a > best.value:
                best = QuotientSup(a, k, i)
    return best


class CFWitness(NamedTuple):
    q: int
    product: float


_DENOM_CAP = 1 << 512


def mt_liminf_witnesses_from_cf(u: QuadIrr, p: int, k_max: int,
                                len_max: int) -> list[CFWitness]:
    """Candidate denominators q = p^k * k_n from convergents of p^k * u.

    k_n runs over the convergent denominators of the expansion of p^k * u;
    each candidate is evaluated exactly in the three-factor product
    |q| * |q|_p * dist(q*u, Z) and the list is returned sorted by product.
    These witnesses can never beat the true scan minimum over the same
    range of q, which is what makes the direct scan their oracle.
    """
    if k_max < 0 or len_max < 1:
        raise ValueError("k_max >= 0 and len_max >= 1 required")
    seen: dict[int, float] = {}
    for k in range(k_max + 1):
        exp = cf_expand(u.scale(p ** k))
        pk = p ** k
        for _, kn in exp.convergents(len_max):
            if kn > _DENOM_CAP:
                break
            q = pk * kn
            if q not in seen:
                seen[q] = _mt_product_quad(u, q, p)
    out = [CFWitness(q, v) for q, v in seen.items()]
    out.sort(key=lambda w: (w.product, w.q))
    return out


def _mt_product_quad(u: QuadIrr, q: int, p: int) -> float:
    """q * |q|_p * dist(q*u, Z) evaluated through exact integer arithmetic."""
    qprime, _ = strip_prime(q, p)
    x = u.scale(q)
    m = x.nearest_int()
    # |q*u - m| = |X + Y*sqrt(d)| / c with X, Y integers
    X = x.a - m * x.c
    dist = abs(quad_float(X, x.b, x.c, x.d))
    return qprime * dist
