"""Zero-pattern combinatorics: staircase reduction and common-zero analysis.

The staircase reduction turns an independent family into one whose leading
nonzero indices strictly increase, by exact elimination with a recorded
combination ledger, so every output is a verifiable explicit combination of
the inputs. Common-zero computation and the proportionality-set consistency
check provide the finite-window evidence the disjoint-support constructions
rely on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DependentInput, IndeterminateLeading
from .exact import FormalSum, ScalarExpr
from .interval import DEFAULT_PRECISION
from .seq import LinearCombo, SeqExpr
from .constructions import independence_check


class StaircaseBasis:
    """An exactly reduced family with strictly increasing pivots.

    vectors[k] is structurally zero below pivots[k] and certified nonzero at
    pivots[k]. ledger[k] holds the combination coefficients expressing
    vectors[k] in terms of the original inputs, and order records the input
    permutation chosen while selecting pivots.
    """

    __slots__ = ("vectors", "pivots", "ledger", "order", "window")

    def __init__(self, vectors: list[SeqExpr], pivots: list[int],
                 ledger: list[list[FormalSum]], order: list[int], window: int):
        self.vectors = vectors
        self.pivots = pivots
        self.ledger = ledger
        self.order = order
        self.window = window

    def __len__(self) -> int:
        return len(self.vectors)


def _leading_index(coords: Sequence[FormalSum], window: int) -> int | None:
    for k in range(window):
        if not coords[k].is_zero():
            return k + 1
    return None


def staircase_reduce(basis: Sequence[SeqExpr], window: int,
                     precision: int = DEFAULT_PRECISION) -> StaircaseBasis:
    """Reduce an independent family to staircase form by exact elimination.

    Ties for the minimal leading index break toward the lowest input
    position, which makes the reduction deterministic. Entries that cannot be
    divided exactly abort with IndeterminateLeading rather than guessing a
    pivot.
    """
    basis = list(basis)
    if not basis:
        raise ValueError("empty basis")
    check = independence_check(basis, window, mode="exact", precision=precision)
    if check.verdict == "dependent":
        raise DependentInput(f"inputs are dependent with witness {check.witness}")
    if check.verdict == "indeterminate":
        raise IndeterminateLeading("independence of the inputs could not be certified")

    m = len(basis)
    coords: list[list[FormalSum]] = [
        [v.coord(k) for k in range(1, window + 1)] for v in basis
    ]
    ledger: list[list[FormalSum]] = [
        [FormalSum.of(1) if i == j else FormalSum.zero() for j in range(m)]
        for i in range(m)
    ]
    order = list(range(m))

    pivots: list[int] = []
    for step in range(m):
        best_pos = None
        best_lead = None
        for r in range(step, m):
            lead = _leading_index(coords[r], window)
            if lead is None:
                raise DependentInput(
                    f"input combination at position {order[r]} vanishes on the window"
                )
            if best_lead is None or lead < best_lead:
                best_pos, best_lead = r, lead
        coords[step], coords[best_pos] = coords[best_pos], coords[step]
        ledger[step], ledger[best_pos] = ledger[best_pos], ledger[step]
        order[step], order[best_pos] = order[best_pos], order[step]
        if pivots and best_lead <= pivots[-1]:
            raise IndeterminateLeading(
                f"pivot order violated at index {best_lead}"
            )
        pivots.append(best_lead)
        piv_val = coords[step][best_lead - 1]
        for r in range(step + 1, m):
            val = coords[r][best_lead - 1]
            if val.is_zero():
                continue
            coeff = val.div_exact(piv_val)
            if coeff is None:
                raise IndeterminateLeading(
                    f"entry at row {order[r]}, column {best_lead} has no exact ratio "
                    "to the pivot"
                )
            coords[r] = [
                coords[r][c] - coords[step][c] * coeff for c in range(window)
            ]
            ledger[r] = [
                ledger[r][c] - ledger[step][c] * coeff for c in range(m)
            ]

    vectors = [
        _combo_from_ledger(basis, ledger[i]) for i in range(m)
    ]
    return StaircaseBasis(vectors, pivots, ledger, order, window)


def _combo_from_ledger(inputs: Sequence[SeqExpr], coeffs: Sequence[FormalSum]) -> SeqExpr:
    terms: list[tuple[ScalarExpr, SeqExpr]] = []
    for inp, coeff in zip(inputs, coeffs):
        for mono in coeff.terms:
            terms.append((mono, inp))
    return LinearCombo(terms)


class CommonZeroReport:
    """Positions on the window where every vector is structurally zero."""

    __slots__ = ("window", "positions", "per_vector")

    def __init__(self, window: int, positions: list[int],
                 per_vector: list[list[int]]):
        self.window = window
        self.positions = positions
        self.per_vector = per_vector


def common_zeros(vectors: Sequence[SeqExpr], window: int) -> CommonZeroReport:
    """Intersect the structural zero sets of the vectors over the window."""
    per_vector: list[list[int]] = []
    for v in vectors:
        per_vector.append(
            [k for k in range(1, window + 1) if v.coord(k).is_zero()]
        )
    if not per_vector:
        return CommonZeroReport(window, list(range(1, window + 1)), [])
    common = set(per_vector[0])
    for zs in per_vector[1:]:
        common &= set(zs)
    return CommonZeroReport(window, sorted(common), per_vector)


class PartitionReport:
    """Proportionality sets N_a = {n : a*x1_n = x2_n} and their overlaps.

    Overlap positions for distinct scalars must already be common zeros; any
    violation indicates an arithmetic bug rather than a mathematical
    possibility.
    """

    __slots__ = ("window", "sets", "common", "violations")

    def __init__(self, window: int, sets: dict[Fraction, list[int]],
                 common: list[int], violations: list[tuple[Fraction, Fraction, int]]):
        self.window = window
        self.sets = sets
        self.common = common
        self.violations = violations


def scalar_partition_check(x1: SeqExpr, x2: SeqExpr,
                           scalars: Iterable[Fraction | int],
                           window: int) -> PartitionReport:
    """Compute the proportionality sets of a pair and audit their overlaps."""
    scalars = [Fraction(a) for a in scalars]
    if len(set(scalars)) != len(scalars):
        raise ValueError("scalars must be pairwise distinct")
    if any(a == 0 for a in scalars):
        raise ValueError("scalars must be nonzero")

    c1 = [x1.coord(k) for k in range(1, window + 1)]
    c2 = [x2.coord(k) for k in range(1, window + 1)]
    common = [
        k for k in range(1, window + 1)
        if c1[k - 1].is_zero() and c2[k - 1].is_zero()
    ]
    sets: dict[Fraction, list[int]] = {}
    for a in scalars:
        sets[a] = [
            k for k in range(1, window + 1)
            if c1[k - 1].scale(a) == c2[k - 1]
        ]
    violations: list[tuple[Fraction, Fraction, int]] = []
    common_set = set(common)
    for i, a in enumerate(scalars):
        for b in scalars[i + 1:]:
            for n in set(sets[a]) & set(sets[b]):
                if n not in common_set:
                    violations.append((a, b, n))
    return PartitionReport(window, sets, common, violations)
