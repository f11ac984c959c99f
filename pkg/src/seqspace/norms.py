"""Certified p-norms, quasi-norms, the sup norm, and tail-decay certificates.

Conventions: for p in (0, 1] the norm is the p-th power sum itself (no root),
which is the functional making the space a p-Banach space; for p in [1, inf)
the usual p-th root is taken; p = inf is the supremum. Wherever every
coordinate power is rational the computation stays exact and the returned
enclosure is degenerate.

The decay machinery certifies sums of the form

    sum_{n > r} t_n * (n/r)**(-k)

for bounded drivers t, splitting into an exactly-enclosed head and an
integral-comparison tail bound, and searches decay schedules for the first
exponent at which the whole sum is certifiably below a target.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

from .errors import KTooSmall, UncertifiableSup, UncertifiableTail, WitnessExhausted
from .exact import FormalSum, ScalarExpr
from .exponents import PExponent
from .interval import (
    DEFAULT_PRECISION,
    CertInterval,
    eval_scalar,
    eval_sum,
    pow_enclose,
)
from .seq import SeqExpr, tail_power_bound

MAX_HEAD_LENGTH = 1_000_000


def tail_power_exact(s: SeqExpr, L: int, p: PExponent) -> FormalSum | None:
    """Exact symbolic tail of the p-th power sum beyond the window, if available."""
    from .seq import FiniteSupport, PowerTail

    if isinstance(s, FiniteSupport):
        if p.is_infinite:
            extra = [abs(v) for idx, v in s.entries if idx > L]
            vals = [v.as_rational() for v in extra]
            if any(v is None for v in vals):
                return None
            return FormalSum.of(max(vals, default=Fraction(0)))
        return FormalSum.from_terms(
            abs(v).pow(p.p) for idx, v in s.entries if idx > L
        )
    if isinstance(s, PowerTail):
        first = max(L + 1, s.start)
        j0 = first - s.start
        mag = abs(s.coefficient)
        if p.is_infinite:
            return FormalSum.of(mag * s.ratio.pow(j0))
        rp = s.ratio.pow(p.p)
        r_val = rp.as_rational()
        if r_val is None:
            return None
        head = mag.pow(p.p) * rp.pow(j0)
        return FormalSum.of(head.scale(Fraction(1) / (1 - r_val)))
    m = s.support_max()
    if m is not None and m <= L:
        return FormalSum.zero()
    return None


def p_norm(s: SeqExpr, p: PExponent, L: int,
           precision: int = DEFAULT_PRECISION) -> CertInterval:
    """Certified enclosure of the p-norm of a sequence expression.

    The window length L controls how many coordinates are summed explicitly;
    the rest must be covered by a closed-form tail, else UncertifiableTail.
    """
    if L < 1:
        raise ValueError(f"window length must be positive, got {L}")

    if p.is_infinite:
        return _sup_norm(s, L, precision)

    exact_head = FormalSum.zero()
    inexact = CertInterval.zero(precision)
    have_inexact = False
    for k in range(1, L + 1):
        fs = s.coord(k)
        if fs.is_zero():
            continue
        mono = fs.as_monomial()
        if mono is not None:
            exact_head = exact_head + FormalSum.of(abs(mono).pow(p.p))
        else:
            box = abs(eval_sum(fs, precision))
            if box.hi <= 0:
                continue
            if box.lo > 0:
                powed = box.pow_rational(p.p)
            else:
                powed = _power_of_straddle(box, p.p, precision)
            inexact = inexact + powed
            have_inexact = True

    exact_tail = tail_power_exact(s, L, p)
    if exact_tail is None:
        tail_box = tail_power_bound(s, L, p, precision)
        if tail_box is None:
            raise UncertifiableTail(
                "no closed-form tail bound applies beyond the window"
            )
    else:
        tail_box = None

    if exact_tail is not None and not have_inexact:
        total = exact_head + exact_tail
        total_rat = total.as_rational()
        if total_rat is not None:
            if not p.takes_root:
                return CertInterval.from_rational(total_rat, precision)
            if total_rat == 0:
                return CertInterval.zero(precision)
            return pow_enclose(total_rat, Fraction(1) / p.p, precision)
        box = eval_sum(total, precision)
    else:
        box = eval_sum(exact_head, precision) + inexact
        box = box + (eval_sum(exact_tail, precision) if exact_tail is not None else tail_box)

    box = _zero_floor(box, precision)
    if not p.takes_root:
        return box
    if box.hi <= 0:
        return CertInterval.zero(precision)
    lo = CertInterval.zero(precision).lo
    if box.lo > 0:
        lo = box.pow_rational(Fraction(1) / p.p).lo
    hi = CertInterval(box.hi, box.hi, precision).pow_rational(Fraction(1) / p.p).hi
    return CertInterval(lo, hi, precision)


def _zero_floor(box: CertInterval, precision: int) -> CertInterval:
    """Clamp a power-sum enclosure to the nonnegative axis."""
    if box.lo >= 0:
        return box
    return CertInterval(CertInterval.zero(precision).lo, max(box.hi, CertInterval.zero(precision).hi), precision)


def _power_of_straddle(box: CertInterval, p: Fraction, precision: int) -> CertInterval:
    hi = CertInterval(box.hi, box.hi, precision).pow_rational(p).hi if box.hi > 0 else CertInterval.zero(precision).hi
    return CertInterval(CertInterval.zero(precision).lo, hi, precision)


def _sup_norm(s: SeqExpr, L: int, precision: int) -> CertInterval:
    exact_vals: list[Fraction] = []
    boxes: list[CertInterval] = []
    for k in range(1, L + 1):
        fs = s.coord(k)
        if fs.is_zero():
            continue
        q = fs.as_rational()
        if q is not None:
            exact_vals.append(abs(q))
        else:
            boxes.append(abs(eval_sum(fs, precision)))

    p_inf = PExponent.infinity()
    exact_tail = tail_power_exact(s, L, p_inf)
    tail_rat = exact_tail.as_rational() if exact_tail is not None else None
    if exact_tail is not None and tail_rat is not None:
        exact_vals.append(abs(tail_rat))
    elif exact_tail is not None:
        boxes.append(abs(eval_sum(exact_tail, precision)))
    else:
        tail_box = tail_power_bound(s, L, p_inf, precision)
        if tail_box is None:
            raise UncertifiableTail("no certified supremum bound beyond the window")
        boxes.append(tail_box)

    if not boxes:
        best = max(exact_vals, default=Fraction(0))
        return CertInterval.from_rational(best, precision)
    if exact_vals:
        boxes.append(CertInterval.from_rational(max(exact_vals), precision))
    lo = max(b.lo for b in boxes)
    hi = max(b.hi for b in boxes)
    return CertInterval(lo, hi, precision)


def certified_sup(s: SeqExpr, window: int, precision: int = DEFAULT_PRECISION) -> Fraction:
    """A certified rational upper bound on sup |s_k| over all k."""
    try:
        box = _sup_norm(s, window, precision)
    except UncertifiableTail as exc:
        raise UncertifiableSup(str(exc)) from exc
    return box.hi_fraction()


class BoundedSequence:
    """A bounded scalar driver (t_n) with a certified sup bound.

    The constant and alternating drivers cover the standard probes; arbitrary
    sequence expressions can be wrapped once a sup bound is certified.
    """

    __slots__ = ("_fn", "sup", "label")

    def __init__(self, fn: Callable[[int], FormalSum], sup: Fraction, label: str):
        if sup < 0:
            raise ValueError("sup bound must be nonnegative")
        self._fn = fn
        self.sup = Fraction(sup)
        self.label = label

    def term(self, n: int) -> FormalSum:
        return self._fn(n)

    @staticmethod
    def constant(value: Fraction | int = 1) -> "BoundedSequence":
        value = Fraction(value)
        cached = FormalSum.of(value) if value else FormalSum.zero()
        return BoundedSequence(lambda n: cached, abs(value), f"constant({value})")

    @staticmethod
    def alternating(value: Fraction | int = 1) -> "BoundedSequence":
        value = Fraction(value)
        pos = FormalSum.of(value)
        neg = FormalSum.of(-value)
        return BoundedSequence(
            lambda n: pos if n % 2 == 0 else neg, abs(value), f"alternating({value})"
        )

    @staticmethod
    def zero() -> "BoundedSequence":
        return BoundedSequence(lambda n: FormalSum.zero(), Fraction(0), "zero")

    @staticmethod
    def from_seq(s: SeqExpr, window: int, precision: int = DEFAULT_PRECISION,
                 sup: Fraction | None = None) -> "BoundedSequence":
        if sup is None:
            sup = certified_sup(s, window, precision)
        return BoundedSequence(s.coord, Fraction(sup), "seq")


class TailBoundCertificate:
    """Certificate for sum_{n>r} t_n (n/r)**(-k): exact-by-intervals head up to
    n0 - 1, integral-comparison bound past n0, and their certified total."""

    __slots__ = ("r", "k", "head_length", "head_value", "tail_bound", "total")

    def __init__(self, r: int, k: Fraction, head_length: int,
                 head_value: CertInterval, tail_bound: CertInterval,
                 total: CertInterval):
        self.r = r
        self.k = k
        self.head_length = head_length
        self.head_value = head_value
        self.tail_bound = tail_bound
        self.total = total

    def __repr__(self) -> str:
        return (f"TailBoundCertificate(r={self.r}, k={self.k}, "
                f"n0={self.head_length}, total={self.total})")


def tail_decay_enclose(t: BoundedSequence, r: int, k: Fraction | int, n0: int,
                       precision: int = DEFAULT_PRECISION) -> TailBoundCertificate:
    """Certified enclosure of sum_{n=r+1}^inf t_n (n/r)**(-k) for k > 2.

    The head n in [r+1, n0) is summed in interval arithmetic; the tail past n0
    is bounded by C * r**k * (n0-1)**(1-k) / (k-1), by comparison with the
    integral of x**(-k). The hypothesis k > 2 is enforced as stated even
    though the comparison needs only k > 1.
    """
    k = Fraction(k)
    if k <= 2:
        raise KTooSmall(f"decay exponent must exceed 2, got {k}")
    if r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    if n0 <= r + 1:
        n0 = r + 2

    head = CertInterval.zero(precision)
    k_int = k.denominator == 1
    for n in range(r + 1, n0):
        term = t.term(n)
        if term.is_zero():
            continue
        if k_int:
            weight = CertInterval.from_rational(
                Fraction(r, n) ** k.numerator, precision
            )
        else:
            weight = pow_enclose(Fraction(n, r), -k, precision)
        q = term.as_rational()
        if q is not None:
            head = head + weight.scale_rational(q)
        else:
            head = head + weight * eval_sum(term, precision)

    c_sup = t.sup
    if c_sup == 0:
        tail_hi_box = CertInterval.zero(precision)
    else:
        rk = pow_enclose(Fraction(r), k, precision)
        decay = pow_enclose(Fraction(n0 - 1), 1 - k, precision)
        tail_hi_box = (rk * decay).scale_rational(c_sup / (k - 1))
    tail_bound = CertInterval(CertInterval.zero(precision).lo, tail_hi_box.hi, precision)

    spread = (-tail_bound).hull(tail_bound)
    total = head + spread
    return TailBoundCertificate(r, k, n0, head, tail_bound, total)


def auto_head_length(sup: Fraction, r: int, k: Fraction, target: Fraction) -> int:
    """Smallest head length making the integral tail term at most target,
    capped to keep the head finite; the certificate stays rigorous either way."""
    if sup == 0 or target <= 0:
        return r + 2
    k = Fraction(k)
    log_x = (
        math.log(float(sup))
        + float(k) * math.log(r)
        - math.log(float(k) - 1)
        - math.log(float(target))
    )
    if log_x <= 0:
        return r + 2
    n0 = 1 + math.ceil(math.exp(log_x / (float(k) - 1)))
    return max(r + 2, min(n0, MAX_HEAD_LENGTH))


class WitnessResult:
    """Outcome of a decay-witness search: the first certified index and the
    per-probe certificates inspected on the way."""

    __slots__ = ("j_star", "k_star", "probes")

    def __init__(self, j_star: int, k_star: Fraction,
                 probes: list[tuple[int, Fraction, TailBoundCertificate]]):
        self.j_star = j_star
        self.k_star = k_star
        self.probes = probes


def decay_witness(t: BoundedSequence, r: int,
                  k_schedule: Callable[[int], Fraction] | Sequence[Fraction],
                  epsilon: Fraction, j_max: int,
                  precision: int = DEFAULT_PRECISION,
                  n0: int | None = None) -> WitnessResult:
    """First j <= j_max whose exponent k_j certifies |sum| < epsilon.

    The schedule must be strictly increasing with k_1 > 2 on the probed
    range. Exhaustion signals that j_max or the precision is too small, never
    that the limit fails.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    def k_at(j: int) -> Fraction:
        if callable(k_schedule):
            return Fraction(k_schedule(j))
        return Fraction(k_schedule[j - 1])

    if k_at(1) <= 2:
        raise KTooSmall(f"schedule must start above 2, got k_1 = {k_at(1)}")

    probes: list[tuple[int, Fraction, TailBoundCertificate]] = []
    prev_k: Fraction | None = None
    for j in range(1, j_max + 1):
        k = k_at(j)
        if prev_k is not None and k <= prev_k:
            raise ValueError(f"schedule not strictly increasing at j={j}")
        prev_k = k
        head_len = n0 if n0 is not None else auto_head_length(
            t.sup, r, k, epsilon / 8
        )
        cert = tail_decay_enclose(t, r, k, head_len, precision)
        probes.append((j, k, cert))
        mag = abs(cert.total)
        if mag.hi < epsilon:
            return WitnessResult(j, k, probes)
    raise WitnessExhausted(
        f"no j <= {j_max} certified |sum| < {epsilon}; raise j_max or precision"
    )
