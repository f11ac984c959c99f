import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from seqspace.errors import KTooSmall, UncertifiableTail, WitnessExhausted
from seqspace.exponents import PExponent
from seqspace.norms import (
    BoundedSequence,
    decay_witness,
    p_norm,
    tail_decay_enclose,
)
from seqspace.seq import FiniteSupport, PowerTail, lin_combo

P1 = PExponent.finite(1)
P2 = PExponent.finite(2)
Ph = PExponent.finite(F(1, 2))
Pinf = PExponent.infinity()


def brute_decay_sum(r: int, k: int, terms: int = 10**6, alternating=False) -> tuple[float, float]:
    """Independent oracle: float partial sum of sum_{n>r} t_n (n/r)**(-k)
    plus an integral bound on what was left off."""
    total = math.fsum(
        ((-1.0) ** n if alternating else 1.0) * (r / n) ** k
        for n in range(r + 1, r + 1 + terms)
    )
    n0 = r + 1 + terms
    leftover = (r**k) * (n0 - 1) ** (1 - k) / (k - 1)
    return total, leftover


def test_q_exponent_convention():
    assert P1.q == 1
    assert P2.q == 1
    assert Pinf.q == 1
    assert Ph.q == F(1, 2)


def test_p_norm_examples():
    zero = FiniteSupport([])
    assert p_norm(zero, Ph, 5, 128).contains_rational(0)
    box = p_norm(FiniteSupport([(1, 3), (2, 4)]), P2, 5, 128)
    assert box.is_degenerate() and box.contains_rational(5)


def test_p_norm_scaling_property():
    s = FiniteSupport([(1, F(2, 3)), (4, F(-5, 7))])
    base = p_norm(s, P2, 6, 160)
    c = F(-3, 2)
    scaled = p_norm(lin_combo([(c, s)]), P2, 6, 160)
    lo = base.lo_fraction() * abs(c)
    hi = base.hi_fraction() * abs(c)
    assert scaled.lo_fraction() <= hi and lo <= scaled.hi_fraction()
    # below p = 1 the functional scales with |c|**p
    base_h = p_norm(s, Ph, 6, 160)
    scaled_h = p_norm(lin_combo([(F(4), s)]), Ph, 6, 160)
    # |4|**(1/2) = 2 exactly
    assert scaled_h.contains_rational(base_h.lo_fraction() * 2) or \
        (base_h.lo_fraction() * 2 <= scaled_h.hi_fraction()
         and scaled_h.lo_fraction() <= base_h.hi_fraction() * 2)


@given(st.lists(st.tuples(st.integers(1, 8),
                          st.fractions(min_value=F(-4), max_value=F(4),
                                       max_denominator=5).filter(bool)),
                min_size=1, max_size=4, unique_by=lambda e: e[0]),
       st.lists(st.tuples(st.integers(1, 8),
                          st.fractions(min_value=F(-4), max_value=F(4),
                                       max_denominator=5).filter(bool)),
                min_size=1, max_size=4, unique_by=lambda e: e[0]))
@settings(max_examples=50, deadline=None)
def test_p_triangle_inequality(e1, e2):
    s, t = FiniteSupport(e1), FiniteSupport(e2)
    for p in (Ph, P1):
        both = p_norm(lin_combo([(1, s), (1, t)]), p, 10, 160)
        sep = p_norm(s, p, 10, 160).hi_fraction() + p_norm(t, p, 10, 160).hi_fraction()
        assert both.hi_fraction() <= sep + F(1, 2**80)


@given(st.lists(st.tuples(st.integers(1, 10),
                          st.fractions(min_value=F(-5), max_value=F(5),
                                       max_denominator=6).filter(bool)),
                min_size=0, max_size=5, unique_by=lambda e: e[0]))
@settings(max_examples=50, deadline=None)
def test_p_norm_agrees_with_exhaustive_sum(entries):
    s = FiniteSupport(entries)
    exact = sum((abs(v) for _, v in entries), F(0))
    assert p_norm(s, P1, 12, 160).contains_rational(exact)
    sup = max((abs(v) for _, v in entries), default=F(0))
    assert p_norm(s, Pinf, 12, 160).contains_rational(sup)


def test_p_norm_requires_certifiable_tail():
    from seqspace.exact import FormalSum
    from seqspace.seq import SeqExpr

    s = lin_combo([(1, PowerTail(1, F(1, 2), 1))])
    # a window plus closed-form tail is fine for combos of power tails
    p_norm(s, P1, 4, 128)

    class Opaque(SeqExpr):
        def coord(self, k):
            return FormalSum.of(1)

        def support_min(self):
            return 1

        def support_max(self):
            return None

    with pytest.raises(UncertifiableTail):
        p_norm(Opaque(), P1, 4, 128)


def test_tail_decay_trivial_and_known_values():
    zero = BoundedSequence.zero()
    cert = tail_decay_enclose(zero, 1, 3, 100, 128)
    assert cert.total.contains_rational(0)

    one = BoundedSequence.constant(1)
    cert = tail_decay_enclose(one, 1, 3, 10**4, 128)
    # sum_{n>=2} n**(-3) = zeta(3) - 1, pinned independently
    brute, leftover = brute_decay_sum(1, 3, 10**6)
    assert cert.total.lo_fraction() <= F(brute + leftover)
    assert F(brute - leftover) <= cert.total.hi_fraction()
    # the window at n0 = 10**4 leaves a certified tail near 5e-9 either side
    assert cert.total.width_fraction() < F(2, 10**8)
    assert abs(float(cert.total.lo_fraction()) - 0.2020569031595942) < 1e-7

    cert20 = tail_decay_enclose(one, 2, 20, 10**3, 128)
    assert abs(cert20.total).hi_fraction() < F(1, 1000)


def test_tail_decay_certificate_structure():
    one = BoundedSequence.constant(1)
    cert = tail_decay_enclose(one, 2, 5, 50, 128)
    assert cert.r == 2 and cert.k == 5 and cert.head_length == 50
    spread_lo = cert.head_value.lo_fraction() - cert.tail_bound.hi_fraction()
    spread_hi = cert.head_value.hi_fraction() + cert.tail_bound.hi_fraction()
    assert cert.total.lo_fraction() <= spread_lo
    assert spread_hi <= cert.total.hi_fraction()


def test_tail_decay_rejects_small_k():
    with pytest.raises(KTooSmall):
        tail_decay_enclose(BoundedSequence.constant(1), 1, 2, 100, 128)
    with pytest.raises(KTooSmall):
        decay_witness(BoundedSequence.constant(1), 1,
                      lambda j: F(j), F(1, 10), 5, 128)


def test_decay_monotone_in_k():
    one = BoundedSequence.constant(1)
    uppers = []
    for k in range(3, 12):
        cert = tail_decay_enclose(one, 1, k, 2000, 128)
        uppers.append(abs(cert.total).hi_fraction())
    assert all(b <= a for a, b in zip(uppers, uppers[1:]))


def test_decay_witness_trivial_zero():
    res = decay_witness(BoundedSequence.zero(), 3, lambda j: F(j + 2),
                        F(1, 10**9), 10, 128)
    assert res.j_star == 1


def test_decay_witness_alternating():
    res = decay_witness(BoundedSequence.alternating(1), 1,
                        lambda j: F(2 * j + 1), F(1, 10**4), 20, 128)
    assert res.j_star <= 20
    brute, leftover = brute_decay_sum(1, 2 * res.j_star + 1, 10**5, alternating=True)
    assert abs(brute) - leftover < 1e-4


def test_decay_witness_constant_brute_force_agreement():
    """The schedule k_j = j + 2 with r = 2: the library witness must agree
    with an independent partial-sum oracle about which j first certifies."""
    one = BoundedSequence.constant(1)
    eps = 1e-6
    oracle_j = None
    for j in range(1, 40):
        value, leftover = brute_decay_sum(2, j + 2, 10**5)
        if value + leftover < eps:
            oracle_j = j
            break
    res = decay_witness(one, 2, lambda j: F(j + 2), F(1, 10**6), 40, 160)
    assert res.j_star == oracle_j


def test_decay_witness_exhausted_is_inconclusive():
    with pytest.raises(WitnessExhausted):
        decay_witness(BoundedSequence.constant(1), 2, lambda j: F(j + 2),
                      F(1, 10**6), 5, 128)
