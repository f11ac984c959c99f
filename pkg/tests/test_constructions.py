import random
from fractions import Fraction as F

import pytest

from seqspace.constructions import (
    IndependenceResult,
    UnitBasisFamily,
    apply_bounded_operator,
    apply_summable_operator,
    independence_check,
    pointwise_family_member,
    unit_basis_vector,
    zero_audit,
)
from seqspace.exponents import PExponent
from seqspace.interval import Sign, sign_certify
from seqspace.norms import p_norm
from seqspace.seq import FiniteSupport, PowerTail, lin_combo, truncate, unit_sequence

P1 = PExponent.finite(1)
P2 = PExponent.finite(2)
Ph = PExponent.finite(F(1, 2))
Pinf = PExponent.infinity()


def test_unit_vector_examples():
    u2 = unit_basis_vector(2, P1)
    assert [u2.coord(k).as_rational() for k in (1, 2, 3)] == [F(1, 2), F(1, 4), F(1, 8)]
    u5 = unit_basis_vector(5, Pinf)
    assert u5.coord(1).as_rational() == 1
    with pytest.raises(ValueError):
        unit_basis_vector(1, P1)


def test_unit_vector_norm_is_exactly_one():
    box = p_norm(unit_basis_vector(7, Ph), Ph, 40, 192)
    assert box.is_degenerate() and box.contains_rational(1)
    for n in range(2, 51):
        for p in (Ph, P1, P2, Pinf):
            box = p_norm(unit_basis_vector(n, p), p, 64, 192)
            assert box.is_degenerate() and box.contains_rational(1), (n, p)


def test_bounded_operator_examples():
    run = apply_bounded_operator(unit_sequence(2), 5, 4, P1, 128)
    vals = [run.output.formal(k).as_rational() for k in range(1, 5)]
    assert vals == [F(1, 8), F(1, 16), F(1, 32), F(1, 64)]

    ones = FiniteSupport([(2, 1), (3, 1)])
    run2 = apply_bounded_operator(ones, 3, 1, P1, 128)
    assert run2.output.formal(1).as_rational() == F(5, 24)

    zero = FiniteSupport([])
    run3 = apply_bounded_operator(zero, 4, 6, P1, 128)
    assert run3.output.structural_zeros() == list(range(1, 7))
    assert run3.remainder_bound.contains_rational(0)
    assert run3.remainder_bound.is_degenerate()


def test_bounded_operator_remainder_soundness():
    rng = random.Random(11)
    for _ in range(10):
        entries = [(n, F(rng.randint(-9, 9) or 1, rng.randint(1, 9)))
                   for n in range(2, 9)]
        t = FiniteSupport(entries)
        r1 = apply_bounded_operator(t, 4, 10, P1, 160)
        r2 = apply_bounded_operator(t, 8, 10, P1, 160)
        bound = r1.remainder_bound.hi_fraction()
        for k in range(1, 11):
            d = (r2.output.formal(k) - r1.output.formal(k)).as_rational()
            assert abs(d) <= bound


def test_pointwise_family_examples():
    x = PowerTail(1, F(1, 2), 1)
    fam2 = pointwise_family_member(x, 2)
    for n in range(1, 8):
        assert fam2.coord(n).as_rational() == F(1, 2) ** n * F(1, 2) ** (n - 1)
    e1 = FiniteSupport([(1, 1)])
    fam_j = pointwise_family_member(e1, 7)
    assert fam_j.coord(1).as_rational() == F(1, 7)
    assert pointwise_family_member(x, 1) is x


def test_summable_operator_examples():
    x = PowerTail(1, F(1, 2), 1)
    run = apply_summable_operator(unit_sequence(1), x, 3, 4, P1, 160)
    tx = truncate(x, 4, P1, 160)
    for k in range(1, 5):
        assert run.output.formal(k) == tx.formal(k)

    run0 = apply_summable_operator(FiniteSupport([]), x, 2, 4, P1, 160)
    assert run0.output.structural_zeros() == list(range(1, 5))

    run2 = apply_summable_operator(FiniteSupport([(1, 1), (2, 1)]), x, 3, 2, P1, 160)
    for n in (1, 2):
        x_n = x.coord(n).as_rational()
        assert run2.output.formal(n).as_rational() == x_n * (1 + F(1, 2) ** n)


def test_zero_audit_partition():
    tv = truncate(unit_basis_vector(2, P1), 8, P1, 128)
    rep = zero_audit(tv)
    assert rep.counts() == (8, 0, 0)

    tv0 = truncate(FiniteSupport([]), 5, P1, 128)
    rep0 = zero_audit(tv0)
    assert rep0.structural_zero == [1, 2, 3, 4, 5]

    assert sum(rep.counts()) == rep.window


def test_no_spurious_zeros_random_inputs():
    rng = random.Random(5)
    for _ in range(10):
        entries = [(n, F(rng.randint(1, 99), rng.randint(1, 99)))
                   for n in range(2, 10)]
        t = FiniteSupport(entries)
        run = apply_bounded_operator(t, 9, 20, P1, 192)
        rep = zero_audit(run.output)
        assert rep.structural_zero == []


def test_independence_examples():
    r = independence_check([unit_basis_vector(n, P1) for n in (2, 3, 4)], 6)
    assert r.verdict == "independent" and r.method == "exact-rational"

    s = PowerTail(1, F(1, 3), 1)
    r2 = independence_check([s, s], 4)
    assert r2.verdict == "dependent" and r2.witness == (F(1), F(-1))

    e1, e2 = unit_sequence(1), unit_sequence(2)
    r3 = independence_check([e1, e2, lin_combo([(1, e1), (1, e2)])], 5)
    assert r3.verdict == "dependent" and r3.witness == (F(1), F(1), F(-1))

    with pytest.raises(ValueError):
        independence_check([e1, e2], 1)


def test_independence_symbolic_and_interval_paths():
    fam = [unit_basis_vector(n, P2) for n in (2, 3, 5)]
    r = independence_check(fam, 6)
    assert r.verdict == "independent"
    assert r.method in ("exact-symbolic", "interval")

    r2 = independence_check(fam, 6, mode="interval")
    assert r2.verdict in ("independent", "indeterminate")


def test_independence_stability_subfamilies():
    rng = random.Random(3)
    pool = list(range(2, 12))
    for _ in range(6):
        size = rng.randint(2, 8)
        ns = rng.sample(pool, size)
        fam = [unit_basis_vector(n, P1) for n in ns]
        r = independence_check(fam, max(10, size), "exact")
        assert r.verdict == "independent", ns
