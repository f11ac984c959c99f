"""Arbitrary-precision interval arithmetic with certified outward rounding.

Endpoints are MPFR binary floats. Every operation rounds the lower endpoint
toward -inf and the upper endpoint toward +inf, so the exact real result of
the corresponding exact-arithmetic expression is always contained in the
returned interval. Mixed mpfr/mpq operations in gmpy2 are single-rounded,
which keeps rational inputs exact up to one directed rounding.

Enclosures never certify equality with zero. Exact zero detection belongs to
the structural layer (empty FormalSum); here an interval straddling zero is
simply indeterminate.
"""

from __future__ import annotations

import enum
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import PrecisionTooCoarse
from .exact import FormalSum, ScalarExpr

MIN_PRECISION = 8
DEFAULT_PRECISION = 256

_GUARD_BITS = 32

_ctx_cache: dict[tuple[int, object], object] = {}


def _dn(prec: int):
    key = (prec, "dn")
    ctx = _ctx_cache.get(key)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
        _ctx_cache[key] = ctx
    return ctx


def _up(prec: int):
    key = (prec, "up")
    ctx = _ctx_cache.get(key)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
        _ctx_cache[key] = ctx
    return ctx


def _check_precision(precision: int) -> None:
    if precision < MIN_PRECISION:
        raise PrecisionTooCoarse(
            f"precision {precision} is below the minimum of {MIN_PRECISION} bits"
        )


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    CONTAINS_ZERO = "contains_zero"


class CertInterval:
    """A closed interval [lo, hi] of MPFR floats satisfying lo <= hi.

    The containment contract: if an interval was produced as the image of
    exact inputs under this module's operations, the exact real value lies
    inside it.
    """

    __slots__ = ("lo", "hi", "precision")

    def __init__(self, lo: mpfr, hi: mpfr, precision: int):
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise ValueError("NaN endpoint in CertInterval")
        if lo > hi:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.precision = precision

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(precision: int = DEFAULT_PRECISION) -> "CertInterval":
        z = mpfr(0, precision)
        return CertInterval(z, z, precision)

    @staticmethod
    def from_rational(q: Fraction | int, precision: int = DEFAULT_PRECISION) -> "CertInterval":
        _check_precision(precision)
        v = mpq(Fraction(q).numerator, Fraction(q).denominator)
        zero = mpfr(0, precision)
        return CertInterval(_dn(precision).add(zero, v), _up(precision).add(zero, v), precision)

    @staticmethod
    def from_endpoints(lo: Fraction | int, hi: Fraction | int,
                       precision: int = DEFAULT_PRECISION) -> "CertInterval":
        a = CertInterval.from_rational(lo, precision)
        b = CertInterval.from_rational(hi, precision)
        return CertInterval(a.lo, b.hi, precision)

    # -- inspection ----------------------------------------------------------

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def width(self) -> mpfr:
        return _up(self.precision).sub(self.hi, self.lo)

    def width_fraction(self) -> Fraction:
        return self.hi_fraction() - self.lo_fraction()

    def contains_rational(self, q: Fraction | int) -> bool:
        v = mpq(Fraction(q).numerator, Fraction(q).denominator)
        return self.lo <= v <= self.hi

    def contains(self, other: "CertInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def straddles_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def sign(self) -> Sign:
        if self.lo > 0:
            return Sign.POSITIVE
        if self.hi < 0:
            return Sign.NEGATIVE
        return Sign.CONTAINS_ZERO

    def lo_fraction(self) -> Fraction:
        r = mpq(self.lo)
        return Fraction(r.numerator, r.denominator)

    def hi_fraction(self) -> Fraction:
        r = mpq(self.hi)
        return Fraction(r.numerator, r.denominator)

    # -- arithmetic ----------------------------------------------------------

    def _prec_with(self, other: "CertInterval") -> int:
        return max(self.precision, other.precision)

    def __add__(self, other: "CertInterval") -> "CertInterval":
        p = self._prec_with(other)
        return CertInterval(_dn(p).add(self.lo, other.lo), _up(p).add(self.hi, other.hi), p)

    def __sub__(self, other: "CertInterval") -> "CertInterval":
        p = self._prec_with(other)
        return CertInterval(_dn(p).sub(self.lo, other.hi), _up(p).sub(self.hi, other.lo), p)

    def __neg__(self) -> "CertInterval":
        # negation through an explicit context: gmpy2's bare unary minus
        # rounds to the default 53-bit context and would lose precision
        m = _dn(self.precision).minus
        return CertInterval(m(self.hi), m(self.lo), self.precision)

    def __abs__(self) -> "CertInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        hi = max(_dn(self.precision).minus(self.lo), self.hi)
        return CertInterval(mpfr(0, self.precision), hi, self.precision)

    def __mul__(self, other: "CertInterval") -> "CertInterval":
        p = self._prec_with(other)
        dn, up = _dn(p), _up(p)
        los = []
        his = []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                los.append(dn.mul(a, b))
                his.append(up.mul(a, b))
        return CertInterval(min(los), max(his), p)

    def __truediv__(self, other: "CertInterval") -> "CertInterval":
        if other.straddles_zero():
            raise ZeroDivisionError("interval division by an interval containing 0")
        p = self._prec_with(other)
        dn, up = _dn(p), _up(p)
        los = []
        his = []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                los.append(dn.div(a, b))
                his.append(up.div(a, b))
        return CertInterval(min(los), max(his), p)

    def scale_rational(self, q: Fraction | int) -> "CertInterval":
        q = Fraction(q)
        v = mpq(q.numerator, q.denominator)
        p = self.precision
        if q >= 0:
            return CertInterval(_dn(p).mul(self.lo, v), _up(p).mul(self.hi, v), p)
        return CertInterval(_dn(p).mul(self.hi, v), _up(p).mul(self.lo, v), p)

    def pow_rational(self, e: Fraction | int) -> "CertInterval":
        """x ** e for an interval with lo > 0 (monotone in x)."""
        e = Fraction(e)
        if self.lo <= 0:
            raise ValueError("pow_rational requires a strictly positive interval")
        if e == 0:
            return CertInterval.from_rational(1, self.precision)
        p = self.precision
        lo = _pow_endpoint(self.lo, e, p, upward=False)
        hi = _pow_endpoint(self.hi, e, p, upward=True)
        if e < 0:
            lo, hi = _pow_endpoint(self.hi, e, p, upward=False), _pow_endpoint(self.lo, e, p, upward=True)
        return CertInterval(lo, hi, p)

    def hull(self, other: "CertInterval") -> "CertInterval":
        p = self._prec_with(other)
        return CertInterval(min(self.lo, other.lo), max(self.hi, other.hi), p)

    def round_to(self, precision: int) -> "CertInterval":
        _check_precision(precision)
        zero = mpfr(0, precision)
        return CertInterval(
            _dn(precision).add(self.lo, zero), _up(precision).add(self.hi, zero), precision
        )

    # -- comparisons, display --------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CertInterval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((mpq(self.lo), mpq(self.hi)))

    def __repr__(self) -> str:
        return f"CertInterval[{self.lo}, {self.hi}]"


def _pow_endpoint(x: mpfr, e: Fraction, precision: int, upward: bool) -> mpfr:
    """Directed-rounding bound for x ** e with x > 0.

    Computed as exp(e * log x) in a few guard bits above the target
    precision; each step is single-rounded in the requested direction, and
    exp/log are monotone, so the final value brackets the exact power.
    """
    work = precision + _GUARD_BITS
    ctx = _up(work) if upward else _dn(work)
    anti = _dn(work) if upward else _up(work)
    eq = mpq(e.numerator, e.denominator)
    # for e < 0 a larger log gives a smaller power, so bound log the other way
    lx = ctx.log(x) if e > 0 else anti.log(x)
    prod = ctx.mul(lx, eq)
    val = ctx.exp(prod)
    out_ctx = _up(precision) if upward else _dn(precision)
    return out_ctx.add(val, mpfr(0, precision))


def pow_enclose(base: Fraction | int, exponent: Fraction | int,
                precision: int = DEFAULT_PRECISION) -> CertInterval:
    """Certified enclosure of base ** exponent for a positive rational base.

    Exactly-representable powers (integer exponents, perfect roots of dyadic
    values) come back as degenerate intervals; everything else is enclosed
    with width at most a few ulps.
    """
    _check_precision(precision)
    base = Fraction(base)
    exponent = Fraction(exponent)
    if base <= 0:
        raise ValueError(f"pow_enclose requires a positive base, got {base}")

    a, b = exponent.numerator, exponent.denominator
    t = base ** a  # exact rational
    if b == 1:
        return CertInterval.from_rational(t, precision)
    rn, exact_n = gmpy2.iroot(gmpy2.mpz(t.numerator), b)
    rd, exact_d = gmpy2.iroot(gmpy2.mpz(t.denominator), b)
    if exact_n and exact_d:
        return CertInterval.from_rational(Fraction(int(rn), int(rd)), precision)

    work = precision + _GUARD_BITS
    x = CertInterval.from_rational(t, work)
    lo = _pow_endpoint(x.lo, Fraction(1, b), work, upward=False)
    hi = _pow_endpoint(x.hi, Fraction(1, b), work, upward=True)
    return CertInterval(lo, hi, work).round_to(precision)


def eval_scalar(s: ScalarExpr, precision: int = DEFAULT_PRECISION) -> CertInterval:
    """Certified enclosure of a single monomial."""
    _check_precision(precision)
    if s.coeff == 0:
        return CertInterval.zero(precision)
    out = CertInterval.from_rational(1, precision + _GUARD_BITS)
    for p, e in s.kernel:
        out = out * pow_enclose(p, e, precision + _GUARD_BITS)
    return out.scale_rational(s.coeff).round_to(precision)


def eval_sum(s: FormalSum, precision: int = DEFAULT_PRECISION) -> CertInterval:
    """Certified enclosure of a formal sum; the structural zero gives [0, 0].

    Rational sums (a single kernel-free term after merging) are enclosed
    directly, so exactly representable values come back degenerate.
    """
    _check_precision(precision)
    q = s.as_rational()
    if q is not None:
        return CertInterval.from_rational(q, precision)
    work = precision + _GUARD_BITS
    acc = CertInterval.zero(work)
    for t in s.terms:
        acc = acc + eval_scalar(t, work)
    return acc.round_to(precision)


def sign_certify(interval: CertInterval) -> Sign:
    """Positive iff lo > 0, Negative iff hi < 0, else ContainsZero."""
    return interval.sign()
