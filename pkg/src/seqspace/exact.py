"""Exact scalar arithmetic: rationals, rational-power monomials, formal sums.

Every coordinate this library ever produces is a finite sum of terms of the
form ``q * prod(p_i ** e_i)`` with ``q`` rational, ``p_i`` distinct primes and
``e_i`` rational exponents in (0, 1). That canonical shape makes three things
exact that interval arithmetic alone cannot deliver:

* multiplication and rational powers of monomials (exponent arithmetic only),
* merging of like terms, so that cancellation to zero is *structural*,
* equality tests, because distinct prime-radical kernels are linearly
  independent over the rationals.

A coordinate is "certified zero" exactly when its formal sum is empty after
merging. An interval that merely straddles zero is never treated as zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

Rational = Fraction

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def parse_rational(text: str) -> Fraction:
    """Parse a rational from 'num/den' or plain integer text."""
    return Fraction(text.strip())


def format_rational(q: Fraction) -> str:
    """Format a rational as 'num/den', or 'num' when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit-ish inputs, probabilistic above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n."""
    import random

    if n % 2 == 0:
        return 2
    rng = random.Random(0xC0FFEE ^ n)
    while True:
        c = rng.randrange(1, n)
        f = lambda x: (x * x + c) % n
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = _int_gcd(abs(x - y), n)
        if d != n:
            return d


def _int_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


_TRIAL_LIMIT = 100_000


def _factor_uncached(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 41
    while f * f <= n and f <= _TRIAL_LIMIT:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= _TRIAL_LIMIT * _TRIAL_LIMIT or _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return tuple(sorted(out.items()))


_factor_cache: dict[int, tuple[tuple[int, int], ...]] = {}


def factor_positive(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer.

    Trial division handles the small bases that dominate here; a Pollard rho
    fallback keeps occasional large coefficient numerators from stalling.
    """
    if n <= 0:
        raise ValueError(f"factor_positive expects a positive integer, got {n}")
    cached = _factor_cache.get(n)
    if cached is None:
        cached = _factor_uncached(n)
        if len(_factor_cache) > 100_000:
            _factor_cache.clear()
        _factor_cache[n] = cached
    return dict(cached)


def _kernel_split(prime_exps: dict[int, Fraction]) -> tuple[Fraction, tuple[tuple[int, Fraction], ...]]:
    """Split prime exponents into an integer part (rational coefficient) and a
    fractional-part kernel with every exponent in (0, 1)."""
    coeff = Fraction(1)
    kernel: list[tuple[int, Fraction]] = []
    for p in sorted(prime_exps):
        e = prime_exps[p]
        if e == 0:
            continue
        n_int = e.numerator // e.denominator  # floor
        frac = e - n_int
        if n_int > 0:
            coeff *= Fraction(p) ** n_int
        elif n_int < 0:
            coeff /= Fraction(p) ** (-n_int)
        if frac != 0:
            kernel.append((p, frac))
    return coeff, tuple(kernel)


class ScalarExpr:
    """A signed product of positive rational bases raised to rational exponents.

    Stored canonically as ``coeff * prod(p ** e)`` with distinct primes ``p``
    and exponents ``e`` in (0, 1); the rational coefficient carries the sign
    and all integer-exponent content. Two ScalarExprs are equal as objects iff
    they are equal as real numbers.
    """

    __slots__ = ("coeff", "kernel")

    def __init__(self, coeff: Fraction, kernel: tuple[tuple[int, Fraction], ...] = ()):
        if type(coeff) is not Fraction:
            coeff = Fraction(coeff)
        if coeff == 0:
            kernel = ()
        self.coeff = coeff
        self.kernel = kernel

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "ScalarExpr":
        return ScalarExpr(Fraction(0))

    @staticmethod
    def one() -> "ScalarExpr":
        return ScalarExpr(Fraction(1))

    @staticmethod
    def from_rational(q: Fraction | int | str) -> "ScalarExpr":
        if isinstance(q, str):
            q = parse_rational(q)
        return ScalarExpr(Fraction(q))

    @staticmethod
    def monomial(base: Fraction | int, exponent: Fraction | int) -> "ScalarExpr":
        """``base ** exponent`` for a positive rational base."""
        base = Fraction(base)
        exponent = Fraction(exponent)
        if base <= 0:
            raise ValueError(f"monomial base must be positive, got {base}")
        if exponent == 0 or base == 1:
            return ScalarExpr.one()
        exps: dict[int, Fraction] = {}
        for p, m in factor_positive(base.numerator).items():
            exps[p] = exps.get(p, Fraction(0)) + m * exponent
        for p, m in factor_positive(base.denominator).items():
            exps[p] = exps.get(p, Fraction(0)) - m * exponent
        coeff, kernel = _kernel_split(exps)
        return ScalarExpr(coeff, kernel)

    # -- canonical views ---------------------------------------------------

    @property
    def sign(self) -> int:
        if self.coeff > 0:
            return 1
        if self.coeff < 0:
            return -1
        return 0

    @property
    def factors(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Full factor multiset view: distinct positive bases with nonzero
        rational exponents, value = sign * prod(base ** exponent)."""
        if self.coeff == 0:
            return ()
        exps: dict[int, Fraction] = {}
        mag = abs(self.coeff)
        for p, m in factor_positive(mag.numerator).items():
            exps[p] = exps.get(p, Fraction(0)) + m
        for p, m in factor_positive(mag.denominator).items():
            exps[p] = exps.get(p, Fraction(0)) - m
        for p, e in self.kernel:
            exps[p] = exps.get(p, Fraction(0)) + e
        return tuple((Fraction(p), e) for p, e in sorted(exps.items()) if e != 0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def is_rational(self) -> bool:
        return not self.kernel

    def as_rational(self) -> Fraction | None:
        return self.coeff if not self.kernel else None

    # -- arithmetic (always exact) ------------------------------------------

    def __mul__(self, other: "ScalarExpr") -> "ScalarExpr":
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        if self.coeff == 0 or other.coeff == 0:
            return ScalarExpr.zero()
        exps: dict[int, Fraction] = dict(self.kernel)
        for p, e in other.kernel:
            exps[p] = exps.get(p, Fraction(0)) + e
        coeff, kernel = _kernel_split(exps)
        return ScalarExpr(self.coeff * other.coeff * coeff, kernel)

    def __neg__(self) -> "ScalarExpr":
        return ScalarExpr(-self.coeff, self.kernel)

    def __abs__(self) -> "ScalarExpr":
        return ScalarExpr(abs(self.coeff), self.kernel)

    def scale(self, q: Fraction | int) -> "ScalarExpr":
        q = Fraction(q)
        if q == 0:
            return ScalarExpr.zero()
        return ScalarExpr(self.coeff * q, self.kernel)

    def pow(self, exponent: Fraction | int) -> "ScalarExpr":
        """Raise to a rational power. Negative values admit integer exponents
        only; zero admits positive exponents only."""
        exponent = Fraction(exponent)
        if self.coeff == 0:
            if exponent <= 0:
                raise ZeroDivisionError("0 cannot be raised to a non-positive power")
            return ScalarExpr.zero()
        if self.coeff < 0 and exponent.denominator != 1:
            raise ValueError("fractional power of a negative scalar")
        if exponent == 0:
            return ScalarExpr.one()
        if exponent.denominator == 1:
            # integer exponents never need the coefficient factored
            n = exponent.numerator
            exps = {p: e * n for p, e in self.kernel}
            extra, kernel = _kernel_split(exps)
            return ScalarExpr(self.coeff ** n * extra, kernel)
        mag = abs(self.coeff)
        exps: dict[int, Fraction] = {}
        for p, m in factor_positive(mag.numerator).items():
            exps[p] = exps.get(p, Fraction(0)) + m * exponent
        for p, m in factor_positive(mag.denominator).items():
            exps[p] = exps.get(p, Fraction(0)) - m * exponent
        for p, e in self.kernel:
            exps[p] = exps.get(p, Fraction(0)) + e * exponent
        coeff, kernel = _kernel_split(exps)
        if self.coeff < 0 and exponent.numerator % 2 == 1:
            coeff = -coeff
        return ScalarExpr(coeff, kernel)

    def reciprocal(self) -> "ScalarExpr":
        return self.pow(Fraction(-1))

    # -- comparisons, hashing, display --------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        return self.coeff == other.coeff and self.kernel == other.kernel

    def __hash__(self) -> int:
        return hash((self.coeff, self.kernel))

    def __repr__(self) -> str:
        if self.coeff == 0:
            return "ScalarExpr(0)"
        parts = [format_rational(self.coeff)]
        parts.extend(f"{p}^({format_rational(e)})" for p, e in self.kernel)
        return "ScalarExpr(%s)" % " * ".join(parts)


class FormalSum:
    """A finite formal sum of ScalarExpr terms, merged by kernel.

    Canonical form: at most one term per kernel, terms sorted by kernel, no
    zero coefficients. The empty sum is the structural zero. Because distinct
    prime-radical kernels are linearly independent over the rationals, a
    FormalSum is empty exactly when its value is zero.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: tuple[ScalarExpr, ...] = ()):
        self.terms = terms

    @staticmethod
    def zero() -> "FormalSum":
        return FormalSum(())

    @staticmethod
    def from_terms(terms: Iterable[ScalarExpr]) -> "FormalSum":
        by_kernel: dict[tuple, Fraction] = {}
        for t in terms:
            if t.coeff == 0:
                continue
            prior = by_kernel.get(t.kernel)
            by_kernel[t.kernel] = t.coeff if prior is None else prior + t.coeff
        merged = tuple(
            ScalarExpr(c, k) for k, c in sorted(by_kernel.items()) if c != 0
        )
        return FormalSum(merged)

    @staticmethod
    def of(*values: ScalarExpr | Fraction | int) -> "FormalSum":
        terms = [
            v if isinstance(v, ScalarExpr) else ScalarExpr.from_rational(v)
            for v in values
        ]
        return FormalSum.from_terms(terms)

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0].kernel)

    def as_rational(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and not self.terms[0].kernel:
            return self.terms[0].coeff
        return None

    def as_monomial(self) -> ScalarExpr | None:
        """The single term if this sum is a monomial (or zero), else None."""
        if not self.terms:
            return ScalarExpr.zero()
        if len(self.terms) == 1:
            return self.terms[0]
        return None

    def __iter__(self) -> Iterator[ScalarExpr]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "FormalSum") -> "FormalSum":
        if not isinstance(other, FormalSum):
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        return FormalSum.from_terms(self.terms + other.terms)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __neg__(self) -> "FormalSum":
        return FormalSum(tuple(-t for t in self.terms))

    def scale(self, s: ScalarExpr | Fraction | int) -> "FormalSum":
        if not isinstance(s, ScalarExpr):
            s = ScalarExpr.from_rational(s)
        if s.coeff == 0:
            return FormalSum.zero()
        return FormalSum.from_terms(t * s for t in self.terms)

    def __mul__(self, other: "FormalSum") -> "FormalSum":
        if not isinstance(other, FormalSum):
            return NotImplemented
        return FormalSum.from_terms(
            a * b for a in self.terms for b in other.terms
        )

    def div_monomial(self, m: ScalarExpr) -> "FormalSum":
        if m.coeff == 0:
            raise ZeroDivisionError("division of a formal sum by zero")
        return self.scale(m.reciprocal())

    def div_exact(self, other: "FormalSum") -> "FormalSum | None":
        """Exact quotient self/other as a formal sum, else None.

        Covers the two cases the eliminations need: a monomial denominator
        (the quotient distributes over the numerator terms), or a constant
        monomial ratio between structurally proportional sums.
        """
        if other.is_zero():
            raise ZeroDivisionError("division of a formal sum by structural zero")
        if self.is_zero():
            return FormalSum.zero()
        m = other.as_monomial()
        if m is not None:
            return self.div_monomial(m)
        candidate = self.terms[0] * other.terms[0].reciprocal()
        if other.scale(candidate) == self:
            return FormalSum.of(candidate)
        return None

    # -- comparisons, hashing, display ---------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "FormalSum(0)"
        return "FormalSum(%s)" % " + ".join(repr(t)[11:-1] for t in self.terms)


# -- JSON wire form ----------------------------------------------------------


def scalar_to_json(s: ScalarExpr) -> dict:
    return {
        "sign": s.sign,
        "factors": [
            {"base": format_rational(base), "exp": format_rational(e)}
            for base, e in s.factors
        ],
    }


def scalar_from_json(obj: dict) -> ScalarExpr:
    sign = int(obj["sign"])
    if sign == 0:
        return ScalarExpr.zero()
    out = ScalarExpr.one()
    for f in obj["factors"]:
        out = out * ScalarExpr.monomial(parse_rational(f["base"]), parse_rational(f["exp"]))
    return out if sign > 0 else -out


def sum_to_json(s: FormalSum) -> list[dict]:
    return [scalar_to_json(t) for t in s.terms]


def sum_from_json(obj: list[dict]) -> FormalSum:
    return FormalSum.from_terms(scalar_from_json(t) for t in obj)
