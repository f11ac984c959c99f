"""Norm exponent types shared by the sequence and norm layers."""

from __future__ import annotations

from fractions import Fraction

from .exact import format_rational, parse_rational


class PExponent:
    """A p-norm exponent: a positive rational, or infinity for the sup norm.

    For p in (0, 1] the associated functional is the p-th power sum without a
    root; for p in [1, infinity) the usual root is taken; infinity means the
    supremum. The convention q = p for p < 1 and q = 1 otherwise is exposed as
    the q attribute, matching the exponent that appears in geometric
    correction bounds.
    """

    __slots__ = ("p",)

    def __init__(self, p: Fraction | int | None):
        if p is not None:
            p = Fraction(p)
            if p <= 0:
                raise ValueError(f"p-exponent must be positive, got {p}")
        self.p = p

    @staticmethod
    def finite(p: Fraction | int) -> "PExponent":
        return PExponent(Fraction(p))

    @staticmethod
    def infinity() -> "PExponent":
        return PExponent(None)

    @staticmethod
    def parse(text: str) -> "PExponent":
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return PExponent.infinity()
        return PExponent(parse_rational(text))

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    @property
    def q(self) -> Fraction:
        """Correction-bound exponent: p below 1, otherwise 1."""
        if self.p is not None and self.p < 1:
            return self.p
        return Fraction(1)

    @property
    def takes_root(self) -> bool:
        """Whether the norm is the p-th root of the power sum."""
        return self.p is not None and self.p >= 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PExponent):
            return NotImplemented
        return self.p == other.p

    def __hash__(self) -> int:
        return hash(self.p)

    def __str__(self) -> str:
        return "inf" if self.p is None else format_rational(self.p)

    def __repr__(self) -> str:
        return f"PExponent({self})"
