from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from seqspace.errors import PrecisionTooCoarse
from seqspace.exact import FormalSum, ScalarExpr
from seqspace.interval import (
    CertInterval,
    Sign,
    eval_scalar,
    eval_sum,
    pow_enclose,
    sign_certify,
)

bases = st.fractions(min_value=F(1, 25), max_value=F(30), max_denominator=25)
exps = st.fractions(min_value=F(-3), max_value=F(3), max_denominator=5)


def contains_power_exactly(box: CertInterval, base: F, exponent: F) -> bool:
    """Exact containment check: lo**q <= base**p <= hi**q with fractions only.

    This is the independent oracle: it never touches the interval code paths
    being tested, only integer arithmetic.
    """
    p, q = exponent.numerator, exponent.denominator
    target = base**p
    lo, hi = box.lo_fraction(), box.hi_fraction()
    if hi < 0:
        return False
    lo = max(lo, F(0))
    return lo**q <= target <= hi**q


def test_pow_enclose_trivial_examples():
    assert pow_enclose(F(1), F(7, 3), 64) == CertInterval.from_rational(1, 64)
    box = pow_enclose(F(4), F(1, 2), 64)
    assert box.is_degenerate() and box.contains_rational(2)


def newton_sqrt_upper(q: F, iters: int = 9) -> F:
    """Newton iteration for sqrt(q) in exact rationals; converges from above."""
    x = F(1) if q >= 1 else q + F(1, 2)
    for _ in range(iters):
        x = (x + q / x) / 2
    return x


def test_pow_enclose_root_two_thirds():
    box = pow_enclose(F(2, 3), F(1, 2), 128)
    assert contains_power_exactly(box, F(2, 3), F(1, 2))
    assert box.width_fraction() <= F(1, 2**126) * box.hi_fraction()
    # independent root-finding oracle: Newton stays above sqrt(2/3), and
    # q/newton stays below, so the enclosure must fit between them
    upper = newton_sqrt_upper(F(2, 3))
    lower = F(2, 3) / upper
    assert lower <= box.hi_fraction() and box.lo_fraction() <= upper
    assert upper - lower < F(1, 10**60)


def test_pow_enclose_rejects_coarse_precision():
    with pytest.raises(PrecisionTooCoarse):
        pow_enclose(F(2), F(1, 2), 7)


@given(bases, exps)
@settings(max_examples=120, deadline=None)
def test_pow_enclose_containment(base, exponent):
    box = pow_enclose(base, exponent, 96)
    assert contains_power_exactly(box, base, exponent)


@given(bases, exps)
@settings(max_examples=60, deadline=None)
def test_pow_enclose_monotone_refinement(base, exponent):
    a = pow_enclose(base, exponent, 64)
    b = pow_enclose(base, exponent, 128)
    assert b.width_fraction() <= a.width_fraction()
    assert a.contains(b)


def test_eval_sum_examples():
    assert eval_sum(FormalSum.zero(), 64) == CertInterval.zero(64)
    two = FormalSum.of(ScalarExpr.from_rational(2))
    assert eval_sum(two, 64).is_degenerate()
    m = ScalarExpr.monomial(F(2, 3), F(1, 2))
    cancel = FormalSum.of(m, -m)
    box = eval_sum(cancel, 64)
    assert box == CertInterval.zero(64)


@given(st.lists(st.fractions(min_value=F(-9), max_value=F(9), max_denominator=12),
                min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_eval_sum_contains_exact_rational(values):
    s = FormalSum.of(*values)
    box = eval_sum(s, 128)
    assert box.contains_rational(sum(values, F(0)))


def test_eval_scalar_mixed_kernel():
    m = ScalarExpr.monomial(F(2, 3), F(1, 2)).scale(-3)
    box = eval_scalar(m, 128)
    lo, hi = box.lo_fraction(), box.hi_fraction()
    # value is -3 * sqrt(2/3): check containment by squaring
    assert lo < 0 and hi < 0
    assert hi**2 <= 9 * F(2, 3) <= lo**2


def test_sign_certify():
    assert sign_certify(CertInterval.from_endpoints(F(1, 4), F(1, 2))) is Sign.POSITIVE
    assert sign_certify(CertInterval.from_endpoints(-3, -1)) is Sign.NEGATIVE
    tiny = CertInterval.from_endpoints(F(-1, 2**200), F(1, 2**200), 256)
    assert sign_certify(tiny) is Sign.CONTAINS_ZERO


def test_interval_division_guards():
    num = CertInterval.from_rational(1, 64)
    with pytest.raises(ZeroDivisionError):
        num / CertInterval.from_endpoints(-1, 1)


@given(st.fractions(min_value=F(-20), max_value=F(20), max_denominator=30),
       st.fractions(min_value=F(-20), max_value=F(20), max_denominator=30))
@settings(max_examples=60, deadline=None)
def test_arith_containment(a, b):
    ia = CertInterval.from_rational(a, 96)
    ib = CertInterval.from_rational(b, 96)
    assert (ia + ib).contains_rational(a + b)
    assert (ia - ib).contains_rational(a - b)
    assert (ia * ib).contains_rational(a * b)
    if b != 0:
        assert (ia / ib).contains_rational(a / b)
