"""Lazy symbolic infinite sequences with structural-zero tracking.

Three expression shapes cover everything the constructions need: finitely
supported vectors, geometric power tails, and lazy linear combinations.
Coordinates are 1-based. Evaluating a coordinate yields an exact FormalSum;
a coordinate is structurally zero exactly when that sum is empty, and for
the class of values representable here that coincides with being zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .errors import UncertifiableTail
from .exact import (
    FormalSum,
    ScalarExpr,
    scalar_from_json,
    scalar_to_json,
)
from .exponents import PExponent
from .interval import DEFAULT_PRECISION, CertInterval, eval_scalar, eval_sum


class SeqExpr:
    """Base class for symbolic sequence expressions."""

    def coord(self, k: int) -> FormalSum:
        """Exact value of the k-th coordinate (1-based)."""
        raise NotImplementedError

    def support_min(self) -> int:
        """Smallest index that can carry a nonzero coordinate."""
        raise NotImplementedError

    def support_max(self) -> int | None:
        """Largest index that can carry a nonzero coordinate, None if unbounded."""
        raise NotImplementedError


class FiniteSupport(SeqExpr):
    """A vector with finitely many explicit coordinates."""

    __slots__ = ("entries", "_lookup")

    def __init__(self, entries: Iterable[tuple[int, ScalarExpr | Fraction | int]]):
        cleaned: list[tuple[int, ScalarExpr]] = []
        for idx, value in entries:
            if not isinstance(value, ScalarExpr):
                value = ScalarExpr.from_rational(value)
            if idx < 1:
                raise ValueError(f"coordinate index must be positive, got {idx}")
            if value.is_zero():
                raise ValueError(f"finite-support entry at {idx} must be nonzero")
            cleaned.append((idx, value))
        cleaned.sort(key=lambda e: e[0])
        for (a, _), (b, _) in zip(cleaned, cleaned[1:]):
            if a == b:
                raise ValueError(f"duplicate coordinate index {a}")
        self.entries = tuple(cleaned)
        self._lookup = {idx: value for idx, value in cleaned}

    def coord(self, k: int) -> FormalSum:
        v = self._lookup.get(k)
        return FormalSum.of(v) if v is not None else FormalSum.zero()

    def support_min(self) -> int:
        return self.entries[0][0] if self.entries else 1

    def support_max(self) -> int | None:
        return self.entries[-1][0] if self.entries else 0

    def __repr__(self) -> str:
        return f"FiniteSupport({list(self.entries)!r})"


def unit_sequence(index: int) -> FiniteSupport:
    """The standard basis vector with a single 1 at the given index."""
    return FiniteSupport([(index, ScalarExpr.one())])


class PowerTail(SeqExpr):
    """coordinate(start + j) = coefficient * ratio**j for j >= 0.

    The ratio must be certified inside (0, 1); rational ratios are checked
    exactly, irrational ones by enclosure.
    """

    __slots__ = ("coefficient", "ratio", "start")

    def __init__(self, coefficient: ScalarExpr | Fraction | int,
                 ratio: ScalarExpr | Fraction | int, start: int = 1):
        if not isinstance(coefficient, ScalarExpr):
            coefficient = ScalarExpr.from_rational(coefficient)
        if not isinstance(ratio, ScalarExpr):
            ratio = ScalarExpr.from_rational(ratio)
        if coefficient.is_zero():
            raise ValueError("power-tail coefficient must be nonzero")
        if start < 1:
            raise ValueError(f"power-tail start must be positive, got {start}")
        q = ratio.as_rational()
        if q is not None:
            if not (0 < q < 1):
                raise ValueError(f"power-tail ratio must lie in (0, 1), got {q}")
        else:
            if ratio.sign <= 0:
                raise ValueError("power-tail ratio must be positive")
            box = eval_scalar(ratio, DEFAULT_PRECISION)
            if not (box.lo > 0 and box.hi < 1):
                raise ValueError(f"power-tail ratio not certified inside (0, 1): {box}")
        self.coefficient = coefficient
        self.ratio = ratio
        self.start = start

    def coord(self, k: int) -> FormalSum:
        if k < self.start:
            return FormalSum.zero()
        return FormalSum.of(self.coefficient * self.ratio.pow(k - self.start))

    def support_min(self) -> int:
        return self.start

    def support_max(self) -> int | None:
        return None

    def __repr__(self) -> str:
        return f"PowerTail({self.coefficient!r}, {self.ratio!r}, start={self.start})"


class LinearCombo(SeqExpr):
    """A lazy weighted sum of sequence expressions.

    Kept unexpanded; coordinates are merged on demand so that towers of
    corrections do not blow up eagerly.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[ScalarExpr | Fraction | int, SeqExpr]]):
        cleaned: list[tuple[ScalarExpr, SeqExpr]] = []
        for weight, term in terms:
            if not isinstance(weight, ScalarExpr):
                weight = ScalarExpr.from_rational(weight)
            if weight.is_zero():
                raise ValueError("linear-combination weights must be nonzero")
            cleaned.append((weight, term))
        self.terms = tuple(cleaned)

    def coord(self, k: int) -> FormalSum:
        acc = FormalSum.zero()
        for weight, term in self.terms:
            acc = acc + term.coord(k).scale(weight)
        return acc

    def support_min(self) -> int:
        if not self.terms:
            return 1
        return min(term.support_min() for _, term in self.terms)

    def support_max(self) -> int | None:
        worst = 0
        for _, term in self.terms:
            m = term.support_max()
            if m is None:
                return None
            worst = max(worst, m)
        return worst

    def __repr__(self) -> str:
        return f"LinearCombo({list(self.terms)!r})"


def lin_combo(terms: Iterable[tuple[ScalarExpr | Fraction | int, SeqExpr]]) -> SeqExpr:
    """Form the coordinatewise weighted sum of sequence expressions."""
    return LinearCombo(terms)


class TruncatedVector:
    """A certified finite window onto a sequence.

    coords[k] is None for a structural zero and otherwise an exact FormalSum
    paired with its enclosure. tail_norm_bound encloses the p-th power sum
    (supremum for p = inf) of every coordinate beyond the window, or is None
    when no closed form applies.
    """

    __slots__ = ("length", "coords", "tail_norm_bound", "p", "precision")

    def __init__(self, length: int,
                 coords: tuple[tuple[FormalSum, CertInterval] | None, ...],
                 tail_norm_bound: CertInterval | None,
                 p: PExponent, precision: int):
        if length < 1 or len(coords) != length:
            raise ValueError("coordinate window does not match the declared length")
        self.length = length
        self.coords = coords
        self.tail_norm_bound = tail_norm_bound
        self.p = p
        self.precision = precision

    def entry(self, k: int) -> tuple[FormalSum, CertInterval] | None:
        if not 1 <= k <= self.length:
            raise IndexError(f"coordinate {k} outside window 1..{self.length}")
        return self.coords[k - 1]

    def formal(self, k: int) -> FormalSum:
        e = self.entry(k)
        return e[0] if e is not None else FormalSum.zero()

    def structural_zeros(self) -> list[int]:
        return [k for k in range(1, self.length + 1) if self.coords[k - 1] is None]

    def __repr__(self) -> str:
        return f"TruncatedVector(length={self.length}, p={self.p})"


def _abs_power(term: ScalarExpr, p: Fraction) -> ScalarExpr:
    return abs(term).pow(p)


def tail_power_bound(s: SeqExpr, L: int, p: PExponent,
                     precision: int = DEFAULT_PRECISION) -> CertInterval | None:
    """Enclosure of the norm contribution of coordinates beyond the window.

    For finite p this is sum_{k>L} |s_k|**p; for p = inf it is the supremum.
    Returns None when no certified closed form applies to the expression.
    """
    if isinstance(s, FiniteSupport):
        extra = [v for idx, v in s.entries if idx > L]
        if not extra:
            return CertInterval.zero(precision)
        if p.is_infinite:
            boxes = [eval_scalar(abs(v), precision) for v in extra]
            lo = max(b.lo for b in boxes)
            hi = max(b.hi for b in boxes)
            return CertInterval(lo, hi, precision)
        total = FormalSum.from_terms(_abs_power(v, p.p) for v in extra)
        return eval_sum(total, precision)

    if isinstance(s, PowerTail):
        first = max(L + 1, s.start)
        j0 = first - s.start
        mag = abs(s.coefficient)
        if p.is_infinite:
            return eval_scalar(mag * s.ratio.pow(j0), precision)
        rp = s.ratio.pow(p.p)
        head = mag.pow(p.p) * rp.pow(j0)
        r_val = rp.as_rational()
        if r_val is not None:
            return eval_scalar(head.scale(Fraction(1) / (1 - r_val)), precision)
        num = eval_scalar(head, precision)
        den = CertInterval.from_rational(1, precision) - eval_scalar(rp, precision)
        if not den.lo > 0:
            return None
        return num / den

    if isinstance(s, LinearCombo):
        parts: list[tuple[ScalarExpr, CertInterval]] = []
        for weight, term in s.terms:
            sub = tail_power_bound(term, L, p, precision)
            if sub is None:
                return None
            parts.append((weight, sub))
        if not parts:
            return CertInterval.zero(precision)
        if p.is_infinite or p.p >= 1:
            # triangle inequality on the norms themselves
            acc = CertInterval.zero(precision)
            for weight, sub in parts:
                w = eval_scalar(abs(weight), precision)
                if p.is_infinite:
                    acc = acc + w * sub
                else:
                    root = _upper_root(sub, p.p, precision)
                    acc = acc + w * root
            if p.is_infinite:
                return CertInterval(CertInterval.zero(precision).lo, acc.hi, precision)
            powed = _upper_power(acc, p.p, precision)
            return CertInterval(CertInterval.zero(precision).lo, powed.hi, precision)
        # p-triangle inequality: the power sum itself is subadditive
        acc = CertInterval.zero(precision)
        for weight, sub in parts:
            wp = eval_scalar(_abs_power(weight, p.p), precision)
            acc = acc + wp * sub
        return CertInterval(CertInterval.zero(precision).lo, acc.hi, precision)

    return None


def _upper_root(box: CertInterval, p: Fraction, precision: int) -> CertInterval:
    """[0, ub] enclosure of box**(1/p) for a nonnegative box."""
    if box.hi <= 0:
        return CertInterval.zero(precision)
    hi_frac = box.hi_fraction()
    from .interval import pow_enclose

    ub = pow_enclose(hi_frac, Fraction(1, 1) / p, precision)
    return CertInterval(CertInterval.zero(precision).lo, ub.hi, precision)


def _upper_power(box: CertInterval, p: Fraction, precision: int) -> CertInterval:
    """[0, ub] enclosure of box**p for a nonnegative box."""
    if box.hi <= 0:
        return CertInterval.zero(precision)
    hi_frac = box.hi_fraction()
    from .interval import pow_enclose

    ub = pow_enclose(hi_frac, p, precision)
    return CertInterval(CertInterval.zero(precision).lo, ub.hi, precision)


def truncate(s: SeqExpr, L: int, p: PExponent,
             precision: int = DEFAULT_PRECISION) -> TruncatedVector:
    """Materialize the first L coordinates with enclosures and a tail bound."""
    if L < 1:
        raise ValueError(f"window length must be positive, got {L}")
    coords: list[tuple[FormalSum, CertInterval] | None] = []
    for k in range(1, L + 1):
        fs = s.coord(k)
        if fs.is_zero():
            coords.append(None)
        else:
            coords.append((fs, eval_sum(fs, precision)))
    tail = tail_power_bound(s, L, p, precision)
    return TruncatedVector(L, tuple(coords), tail, p, precision)


# -- JSON wire form ------------------------------------------------------------


def seq_to_json(s: SeqExpr) -> dict:
    if isinstance(s, FiniteSupport):
        return {
            "kind": "finite",
            "entries": [
                {"index": idx, "value": scalar_to_json(v)} for idx, v in s.entries
            ],
        }
    if isinstance(s, PowerTail):
        return {
            "kind": "powertail",
            "coefficient": scalar_to_json(s.coefficient),
            "ratio": scalar_to_json(s.ratio),
            "start": s.start,
        }
    if isinstance(s, LinearCombo):
        return {
            "kind": "combo",
            "terms": [
                {"weight": scalar_to_json(w), "term": seq_to_json(t)}
                for w, t in s.terms
            ],
        }
    raise TypeError(f"cannot serialize sequence expression {s!r}")


def seq_from_json(obj: dict) -> SeqExpr:
    kind = obj["kind"]
    if kind == "finite":
        return FiniteSupport(
            (int(e["index"]), scalar_from_json(e["value"])) for e in obj["entries"]
        )
    if kind == "powertail":
        return PowerTail(
            scalar_from_json(obj["coefficient"]),
            scalar_from_json(obj["ratio"]),
            int(obj["start"]),
        )
    if kind == "combo":
        return LinearCombo(
            (scalar_from_json(t["weight"]), seq_from_json(t["term"]))
            for t in obj["terms"]
        )
    raise ValueError(f"unknown sequence kind {kind!r}")
