from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from seqspace.exact import (
    FormalSum,
    ScalarExpr,
    factor_positive,
    format_rational,
    parse_rational,
    scalar_from_json,
    scalar_to_json,
    sum_from_json,
    sum_to_json,
)

rationals = st.fractions(
    min_value=F(-50), max_value=F(50), max_denominator=40
)
positive_rationals = st.fractions(
    min_value=F(1, 40), max_value=F(50), max_denominator=40
)
exponents = st.fractions(min_value=F(-4), max_value=F(4), max_denominator=6)


def test_rational_text_roundtrip():
    assert parse_rational("2/3") == F(2, 3)
    assert parse_rational("-7") == F(-7)
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(5)) == "5"


def test_factor_positive_basics():
    assert factor_positive(1) == {}
    assert factor_positive(12) == {2: 2, 3: 1}
    assert factor_positive(2**31 - 1) == {2**31 - 1: 1}  # a Mersenne prime


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=60, deadline=None)
def test_factor_positive_reconstructs(n):
    fac = factor_positive(n)
    prod = 1
    for p, m in fac.items():
        prod *= p**m
    assert prod == n


def test_monomial_value_examples():
    m = ScalarExpr.monomial(F(2, 3), F(1, 2))
    assert (m * m).as_rational() == F(2, 3)
    assert ScalarExpr.monomial(4, F(1, 2)).as_rational() == 2
    assert ScalarExpr.monomial(F(8, 27), F(2, 3)).as_rational() == F(4, 9)
    assert ScalarExpr.monomial(5, 0) == ScalarExpr.one()


def test_sign_and_factor_invariants():
    z = ScalarExpr.zero()
    assert z.sign == 0 and z.factors == ()
    m = -ScalarExpr.monomial(F(8, 9), F(1, 3))
    assert m.sign == -1
    bases = [b for b, _ in m.factors]
    assert bases == sorted(set(bases))
    assert all(e != 0 for _, e in m.factors)


@given(positive_rationals, exponents, exponents)
@settings(max_examples=80, deadline=None)
def test_monomial_pow_is_exact(base, e, f):
    # (b**e)**f == b**(e*f) must hold with no enclosure loss
    lhs = ScalarExpr.monomial(base, e).pow(f) if f != 0 or True else None
    rhs = ScalarExpr.monomial(base, e * f)
    assert lhs == rhs


@given(positive_rationals, positive_rationals, exponents)
@settings(max_examples=80, deadline=None)
def test_monomial_mul_merges_exponents(a, b, e):
    x = ScalarExpr.monomial(a, e) * ScalarExpr.monomial(b, e)
    assert x == ScalarExpr.monomial(a * b, e)


def test_formal_sum_merges_identical_kernels():
    m = ScalarExpr.monomial(F(2, 3), F(1, 2))
    s = FormalSum.of(m, -m)
    assert s.is_zero()
    # 2**(3/2) and 3 * 2**(1/2) share a kernel and must merge to 5 * 2**(1/2)
    a = ScalarExpr.monomial(2, F(3, 2))
    b = ScalarExpr.monomial(2, F(1, 2)).scale(3)
    merged = FormalSum.of(a, b)
    assert len(merged) == 1
    assert merged.terms[0] == ScalarExpr.monomial(2, F(1, 2)).scale(5)


@given(st.lists(rationals, min_size=0, max_size=6))
@settings(max_examples=60, deadline=None)
def test_rational_sums_collapse(values):
    s = FormalSum.of(*values)
    assert s.as_rational() == sum(values, F(0))


def test_div_exact_paths():
    m = ScalarExpr.monomial(F(3, 2), F(1, 2))
    s = FormalSum.of(m.scale(2), ScalarExpr.from_rational(F(5)))
    q = (s.scale(F(7, 3))).div_exact(s)
    assert q == FormalSum.of(ScalarExpr.from_rational(F(7, 3)))
    assert FormalSum.zero().div_exact(s) == FormalSum.zero()
    halved = s.div_exact(FormalSum.of(ScalarExpr.from_rational(2)))
    assert halved is not None and halved == s.scale(F(1, 2))
    other = FormalSum.of(m, ScalarExpr.from_rational(F(1)))
    assert s.div_exact(other) is None
    with pytest.raises(ZeroDivisionError):
        s.div_exact(FormalSum.zero())


def test_formal_sum_product_distributes():
    a = FormalSum.of(ScalarExpr.from_rational(2), ScalarExpr.monomial(2, F(1, 2)))
    b = FormalSum.of(ScalarExpr.from_rational(3), -ScalarExpr.monomial(2, F(1, 2)))
    prod = a * b
    # (2 + r)(3 - r) with r = sqrt(2): 6 + r - r**2 = 4 + r
    expected = FormalSum.of(ScalarExpr.from_rational(4), ScalarExpr.monomial(2, F(1, 2)))
    assert prod == expected


@given(positive_rationals, exponents, st.integers(min_value=-1, max_value=1))
@settings(max_examples=60, deadline=None)
def test_scalar_json_roundtrip(base, e, sign):
    m = ScalarExpr.monomial(base, e)
    if sign == 0:
        m = ScalarExpr.zero()
    elif sign < 0:
        m = -m
    assert scalar_from_json(scalar_to_json(m)) == m


def test_sum_json_roundtrip():
    s = FormalSum.of(
        ScalarExpr.monomial(F(2, 3), F(1, 2)).scale(-2),
        ScalarExpr.from_rational(F(7, 6)),
    )
    assert sum_from_json(sum_to_json(s)) == s
