import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from seqspace.exact import FormalSum, ScalarExpr
from seqspace.exponents import PExponent
from seqspace.seq import (
    FiniteSupport,
    LinearCombo,
    PowerTail,
    SeqExpr,
    lin_combo,
    seq_from_json,
    seq_to_json,
    truncate,
    unit_sequence,
)

P1 = PExponent.finite(1)


def direct_eval(s: SeqExpr, k: int) -> F:
    """Independent recursive evaluation for rational-valued expressions."""
    if isinstance(s, FiniteSupport):
        fs = s.coord(k)
        v = fs.as_rational()
        assert v is not None
        return v
    if isinstance(s, PowerTail):
        if k < s.start:
            return F(0)
        c = s.coefficient.as_rational()
        r = s.ratio.as_rational()
        assert c is not None and r is not None
        return c * r ** (k - s.start)
    if isinstance(s, LinearCombo):
        total = F(0)
        for w, t in s.terms:
            wq = w.as_rational()
            assert wq is not None
            total += wq * direct_eval(t, k)
        return total
    raise TypeError(s)


def test_coord_examples():
    s = FiniteSupport([(3, 5)])
    assert s.coord(3).as_rational() == 5
    assert s.coord(4).is_zero()


def test_finite_support_validation():
    with pytest.raises(ValueError):
        FiniteSupport([(0, 1)])
    with pytest.raises(ValueError):
        FiniteSupport([(2, 0)])
    with pytest.raises(ValueError):
        FiniteSupport([(2, 1), (2, 3)])


def test_power_tail_ratio_certification():
    PowerTail(1, F(1, 3), 1)
    with pytest.raises(ValueError):
        PowerTail(1, F(3, 2), 1)
    with pytest.raises(ValueError):
        PowerTail(1, 1, 1)
    # irrational ratio certified by enclosure: 1/sqrt(2)
    PowerTail(1, ScalarExpr.monomial(2, F(-1, 2)), 1)
    with pytest.raises(ValueError):
        PowerTail(1, ScalarExpr.monomial(2, F(1, 2)), 1)


def test_lin_combo_identity_and_cancellation():
    s = PowerTail(1, F(1, 2), 1)
    ident = lin_combo([(1, s)])
    for k in range(1, 8):
        assert ident.coord(k) == s.coord(k)
    gone = lin_combo([(1, s), (-1, s)])
    assert all(gone.coord(k).is_zero() for k in range(1, 10))


def test_truncate_examples():
    zero = FiniteSupport([])
    tv = truncate(zero, 10, P1, 128)
    assert tv.structural_zeros() == list(range(1, 11))
    assert tv.tail_norm_bound == tv.tail_norm_bound  # present
    assert tv.tail_norm_bound.contains_rational(0)
    assert tv.tail_norm_bound.is_degenerate()

    u2 = PowerTail(F(1, 2), F(1, 2), 1)
    tv2 = truncate(u2, 5, P1, 128)
    vals = [tv2.formal(k).as_rational() for k in range(1, 6)]
    assert vals == [F(1, 2), F(1, 4), F(1, 8), F(1, 16), F(1, 32)]
    assert tv2.tail_norm_bound.contains_rational(F(1, 32))

    pt = PowerTail(1, F(1, 3), 1)
    tv3 = truncate(pt, 2, P1, 128)
    assert [tv3.formal(k).as_rational() for k in (1, 2)] == [1, F(1, 3)]
    assert tv3.tail_norm_bound.contains_rational(F(1, 6))


seq_strategy = st.recursive(
    st.one_of(
        st.lists(
            st.tuples(st.integers(1, 10),
                      st.fractions(min_value=F(-5), max_value=F(5),
                                   max_denominator=6).filter(bool)),
            max_size=4, unique_by=lambda e: e[0],
        ).map(FiniteSupport),
        st.tuples(
            st.fractions(min_value=F(1, 6), max_value=F(5), max_denominator=6),
            st.fractions(min_value=F(1, 5), max_value=F(4, 5), max_denominator=5),
            st.integers(1, 6),
        ).map(lambda t: PowerTail(t[0], t[1], t[2])),
    ),
    lambda inner: st.lists(
        st.tuples(st.fractions(min_value=F(-3), max_value=F(3),
                               max_denominator=4).filter(bool), inner),
        min_size=1, max_size=3,
    ).map(LinearCombo),
    max_leaves=4,
)


@given(seq_strategy, st.integers(1, 12))
@settings(max_examples=80, deadline=None)
def test_coord_matches_direct_eval(s, k):
    fs = s.coord(k)
    v = direct_eval(s, k)
    assert fs.as_rational() == v
    if fs.is_zero():
        assert v == 0


@given(seq_strategy, seq_strategy,
       st.fractions(min_value=F(-3), max_value=F(3), max_denominator=4).filter(bool),
       st.fractions(min_value=F(-3), max_value=F(3), max_denominator=4).filter(bool),
       st.integers(1, 10))
@settings(max_examples=60, deadline=None)
def test_lin_combo_linearity(s, t, a, b, k):
    combo = lin_combo([(a, s), (b, t)])
    expected = s.coord(k).scale(a) + t.coord(k).scale(b)
    assert combo.coord(k) == expected


@given(seq_strategy, st.integers(1, 10))
@settings(max_examples=50, deadline=None)
def test_truncate_window_consistency(s, L):
    tv = truncate(s, L, P1, 128)
    for k in range(1, L + 1):
        entry = tv.entry(k)
        v = direct_eval(s, k)
        if entry is None:
            assert v == 0
        else:
            assert entry[1].contains_rational(v)


@given(seq_strategy)
@settings(max_examples=50, deadline=None)
def test_seq_json_roundtrip(s):
    j = seq_to_json(s)
    s2 = seq_from_json(json.loads(json.dumps(j)))
    assert seq_to_json(s2) == j
    for k in range(1, 12):
        assert s.coord(k) == s2.coord(k)


def test_unit_sequence():
    e3 = unit_sequence(3)
    assert e3.coord(3).as_rational() == 1
    assert e3.coord(2).is_zero()
