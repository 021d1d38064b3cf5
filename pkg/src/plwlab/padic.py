"""Exact p-adic and divisibility-chain arithmetic substrate.

Provides the scalar types the rest of the package is built on: exact
elements of Z[1/p], finite-precision p-adic numbers, divisibility chains
with their pseudo-valuations, and the distance-to-nearest-integer map.

All values are immutable after construction and every operation is a pure
function, so everything here is safe for unrestricted parallel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

DEFAULT_PADIC_PRECISION = 64

Real = Union[int, float, Fraction]


class ZeroNormError(ValueError):
    """Raised when a (pseudo-)valuation of zero is requested.

    |0|_p is left undefined at the arithmetic layer; product evaluators
    that need the "q0 hits exactly" convention map that case to a zero
    product themselves.
    """


class PrecisionError(ArithmeticError):
    """A result would need p-adic digits beyond the working precision."""


def check_prime(p: int) -> int:
    """Validate a prime modulus by trial division up to 10^6.

    Larger inputs that survive the trial divisions are trusted; full
    primality proving is out of scope.
    """
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"prime must be an integer >= 2, got {p!r}")
    limit = min(math.isqrt(p), 10 ** 6)
    d = 2
    while d <= limit:
        if p % d == 0:
            raise ValueError(f"{p} is not prime (divisible by {d})")
        d += 1 if d == 2 else 2
    return p


def padic_valuation(q: int, p: int) -> int:
    """Exact exponent of p in q.  q must be a nonzero integer."""
    if q == 0:
        raise ZeroNormError("p-adic valuation of zero is undefined")
    q = abs(q)
    v = 0
    while q % p == 0:
        v += 1
        q //= p
    return v


def padic_norm(q: int, p: int) -> Fraction:
    """p-adic norm |q|_p = p^(-v_p(q)) as an exact rational.

    >>> padic_norm(12, 2)
    Fraction(1, 4)
    """
    return Fraction(1, p ** padic_valuation(q, p))


def strip_prime(q: int, p: int) -> tuple[int, int]:
    """Return (q / p^v, v) with v the exact p-adic valuation of q != 0."""
    if q == 0:
        raise ZeroNormError("p-adic valuation of zero is undefined")
    v = 0
    while q % p == 0:
        v += 1
        q //= p
    return q, v


@dataclass(frozen=True)
class DSeq:
    """Divisibility chain r_0 = 1, r_{n+1} = r_n * d_{n+1} with d >= 2.

    `ratios` is the finite head of the ratio sequence; if `tail` is
    nonempty it repeats forever after the head, making the chain infinite
    (for example DSeq.geometric(a) is r_n = a^n).  An empty tail leaves a
    finite chain, which is still a valid pseudo-valuation (the infimum is
    over finitely many r_n).
    """

    ratios: tuple[int, ...] = ()
    tail: tuple[int, ...] = ()

    def __post_init__(self):
        for d in self.ratios + self.tail:
            if not isinstance(d, int) or d < 2:
                raise ValueError(f"chain ratios must be integers >= 2, got {d!r}")

    @classmethod
    def geometric(cls, a: int) -> "DSeq":
        """The chain r_n = a^n."""
        return cls((), (a,))

    def ratio_iter(self) -> Iterator[int]:
        yield from self.ratios
        while self.tail:
            yield from self.tail

    def terms(self, count: int) -> list[int]:
        """First `count` chain values r_1, r_2, ... (r_0 = 1 omitted)."""
        out = []
        r = 1
        for d in self.ratio_iter():
            if len(out) >= count:
                break
            r *= d
            out.append(r)
        return out


def d_adic_norm(q: int, dseq: DSeq) -> Fraction:
    """Pseudo-norm |q|_D = 1/r_n for the largest chain value r_n dividing q.

    Agrees with padic_norm for the geometric chain {p^n}; in general it is
    not multiplicative.
    """
    if q == 0:
        raise ZeroNormError("D-adic norm of zero is undefined")
    q = abs(q)
    best = 1
    r = 1
    for d in dseq.ratio_iter():
        r *= d
        if r > q or q % r != 0:
            break
        best = r
    return Fraction(1, best)


def dist_nearest_int(z: Real) -> Union[float, Fraction]:
    """Distance from z to the nearest integer, in [0, 1/2].

    Exact for Fraction input (returns a Fraction); floats go through
    binary64 and return a float.
    """
    if isinstance(z, Fraction):
        frac = z - (z.numerator // z.denominator)
        return min(frac, 1 - frac)
    z = float(z)
    if math.isinf(z) or math.isnan(z):
        raise ValueError("distance to nearest integer needs a finite value")
    f = z - math.floor(z)
    return min(f, 1.0 - f)


@dataclass(frozen=True)
class ZInvP:
    """Exact element of Z[1/p]: value = mantissa / p^exponent.

    Canonical form: exponent >= 0, and p does not divide the mantissa
    unless exponent == 0.  Addition, subtraction and multiplication stay
    inside the ring.
    """

    mantissa: int
    exponent: int
    prime: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")
        if self.exponent > 0 and self.mantissa % self.prime == 0:
            raise ValueError("non-canonical ZInvP: mantissa divisible by p")

    @classmethod
    def make(cls, mantissa: int, exponent: int, p: int) -> "ZInvP":
        """Build in canonical form from any mantissa / p^exponent pair."""
        if mantissa == 0:
            return cls(0, 0, p)
        while exponent > 0 and mantissa % p == 0:
            mantissa //= p
            exponent -= 1
        if exponent < 0:
            mantissa *= p ** (-exponent)
            exponent = 0
        return cls(mantissa, exponent, p)

    @classmethod
    def from_int(cls, n: int, p: int) -> "ZInvP":
        return cls(n, 0, p)

    @classmethod
    def from_fraction(cls, fr: Fraction, p: int) -> "ZInvP":
        den = fr.denominator
        k = 0
        while den % p == 0:
            den //= p
            k += 1
        if den != 1:
            raise ValueError(f"{fr} is not in Z[1/{p}]")
        return cls.make(fr.numerator, k, p)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    @property
    def is_integer(self) -> bool:
        return self.exponent == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa, self.prime ** self.exponent)

    def as_int(self) -> int:
        if self.exponent != 0:
            raise ValueError(f"{self} is not an integer")
        return self.mantissa

    def valuation(self) -> int:
        """p-adic valuation; positive powers of p in the numerator count up."""
        if self.is_zero:
            raise ZeroNormError("valuation of zero is undefined")
        return padic_valuation(self.mantissa, self.prime) - self.exponent

    def norm(self) -> Fraction:
        """|x|_p = p^(-v_p(x)) as an exact rational."""
        v = self.valuation()
        return Fraction(1, self.prime ** v) if v >= 0 else Fraction(self.prime ** (-v))

    def _coerce(self, other) -> "ZInvP":
        if isinstance(other, ZInvP):
            if other.prime != self.prime:
                raise ValueError("mixed primes in Z[1/p] arithmetic")
            return other
        if isinstance(other, int):
            return ZInvP.from_int(other, self.prime)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        k = max(self.exponent, o.exponent)
        p = self.prime
        m = (self.mantissa * p ** (k - self.exponent)
             + o.mantissa * p ** (k - o.exponent))
        return ZInvP.make(m, k, p)

    __radd__ = __add__

    def __neg__(self):
        return ZInvP(-self.mantissa, self.exponent, self.prime)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ZInvP.make(self.mantissa * o.mantissa,
                          self.exponent + o.exponent, self.prime)

    __rmul__ = __mul__

    def __float__(self) -> float:
        return self.mantissa / self.prime ** self.exponent

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.mantissa)
        return f"{self.mantissa}/{self.prime}^{self.exponent}"


@dataclass(frozen=True)
class PAdicApprox:
    """Finite-precision element of Q_p.

    A nonzero value is p^valuation * (unit), with the unit known modulo
    p^precision and stored as `precision` base-p digits, least significant
    first; the leading digit is nonzero.  The value as a whole is known
    exactly modulo p^(valuation + precision), so |x|_p = p^(-valuation) is
    exact.  The zero element is flagged explicitly and is exact.
    """

    prime: int
    valuation: int = 0
    digits: tuple[int, ...] = ()
    is_zero: bool = False

    def __post_init__(self):
        check_prime(self.prime)
        if self.is_zero:
            if self.digits:
                raise ValueError("zero element carries no digits")
            return
        if not self.digits:
            raise ValueError("nonzero element needs at least one digit")
        if any(d < 0 or d >= self.prime for d in self.digits):
            raise ValueError("digit out of range")
        if self.digits[0] == 0:
            raise ValueError("leading digit must be nonzero for a nonzero value")

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "PAdicApprox":
        return cls(p, is_zero=True)

    @classmethod
    def from_int(cls, n: int, p: int,
                 precision: int = DEFAULT_PADIC_PRECISION) -> "PAdicApprox":
        if n == 0:
            return cls.zero(p)
        unit, v = strip_prime(n, p)
        return cls(p, v, _int_digits(unit % p ** precision, p, precision))

    @classmethod
    def from_fraction(cls, fr: Fraction, p: int,
                      precision: int = DEFAULT_PADIC_PRECISION) -> "PAdicApprox":
        if fr == 0:
            return cls.zero(p)
        num, vn = strip_prime(fr.numerator, p)
        den, vd = strip_prime(fr.denominator, p)
        mod = p ** precision
        unit = num * pow(den, -1, mod) % mod
        return cls(p, vn - vd, _int_digits(unit, p, precision))

    # -- accessors ---------------------------------------------------

    @property
    def precision(self) -> int:
        return len(self.digits)

    def unit_int(self) -> int:
        """The unit part as an integer modulo p^precision."""
        u = 0
        for d in reversed(self.digits):
            u = u * self.prime + d
        return u

    def known_exponent(self) -> int:
        """The value is known exactly modulo p^known_exponent()."""
        if self.is_zero:
            raise ZeroNormError("zero is exact; it has no precision window")
        return self.valuation + self.precision

    def residue(self, j: int) -> int:
        """Value mod p^j as an integer in [0, p^j); needs valuation >= 0."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise ValueError("residue only defined for p-adic integers")
        if j > self.known_exponent():
            raise PrecisionError(
                f"residue mod p^{j} needs more than {self.precision} digits")
        return (self.unit_int() * self.prime ** self.valuation) % self.prime ** j

    def norm(self) -> Fraction:
        if self.is_zero:
            raise ZeroNormError("p-adic norm of zero is undefined")
        w = self.valuation
        return Fraction(1, self.prime ** w) if w >= 0 else Fraction(self.prime ** (-w))

    # -- arithmetic --------------------------------------------------

    def shift(self, j: int) -> "PAdicApprox":
        """Multiply by p^j (exact valuation shift)."""
        if self.is_zero:
            return self
        return PAdicApprox(self.prime, self.valuation + j, self.digits)

    def __neg__(self):
        if self.is_zero:
            return self
        mod = self.prime ** self.precision
        return PAdicApprox(self.prime, self.valuation,
                           _int_digits(-self.unit_int() % mod, self.prime,
                                       self.precision))

    def __add__(self, other):
        if not isinstance(other, PAdicApprox):
            if isinstance(other, int):
                other = PAdicApprox.from_int(
                    other, self.prime,
                    self.precision if not self.is_zero else DEFAULT_PADIC_PRECISION)
            else:
                return NotImplemented
        if other.prime != self.prime:
            raise ValueError("mixed primes in p-adic arithmetic")
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.prime
        lo = min(self.valuation, other.valuation)
        window = min(self.known_exponent(), other.known_exponent())
        mod = p ** (window - lo)
        s = (self.unit_int() * p ** (self.valuation - lo)
             + other.unit_int() * p ** (other.valuation - lo)) % mod
        if s == 0:
            raise PrecisionError(
                "cancellation exhausts the working p-adic precision")
        unit, v = strip_prime(s, p)
        prec = window - lo - v
        return PAdicApprox(p, lo + v, _int_digits(unit % p ** prec, p, prec))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        if isinstance(other, PAdicApprox):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return PAdicApprox.zero(self.prime)
            if self.is_zero:
                return self
            unit, v = strip_prime(other, self.prime)
            mod = self.prime ** self.precision
            return PAdicApprox(self.prime, self.valuation + v,
                               _int_digits(self.unit_int() * unit % mod,
                                           self.prime, self.precision))
        if not isinstance(other, PAdicApprox):
            return NotImplemented
        if other.prime != self.prime:
            raise ValueError("mixed primes in p-adic arithmetic")
        if self.is_zero or other.is_zero:
            return PAdicApprox.zero(self.prime)
        prec = min(self.precision, other.precision)
        mod = self.prime ** prec
        return PAdicApprox(self.prime, self.valuation + other.valuation,
                           _int_digits(self.unit_int() * other.unit_int() % mod,
                                       self.prime, prec))

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        body = ",".join(str(d) for d in self.digits[:8])
        tail = ",..." if self.precision > 8 else ""
        return f"({body}{tail})_{self.prime}*{self.prime}^{self.valuation}"


def _int_digits(n: int, p: int, count: int) -> tuple[int, ...]:
    out = []
    for _ in range(count):
        n, d = divmod(n, p)
        out.append(d)
    return tuple(out)
