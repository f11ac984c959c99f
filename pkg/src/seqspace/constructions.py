"""Explicit families and operators witnessing lineability at finite truncation.

Two constructions live here. The first is the normalized geometric family
u_n (n >= 2) whose p-norm is exactly 1 for every p, together with the
operator sending a bounded sequence t to sum_n t_n 2**(-n) u_n. The second is
the pointwise family j**(-n) x_n built from a given sequence x, with the
operator summing it against an absolutely summable weight sequence. Both
operators come with certified remainder bounds for the discarded terms, and
the zero audit partitions a window into structurally zero, certified nonzero
and indeterminate coordinates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Literal

from .errors import UncertifiableSup, UncertifiableTail
from .exact import FormalSum, ScalarExpr
from .exponents import PExponent
from .interval import (
    DEFAULT_PRECISION,
    CertInterval,
    Sign,
    eval_scalar,
    eval_sum,
    pow_enclose,
    sign_certify,
)
from .norms import certified_sup, p_norm, tail_power_exact
from .seq import (
    FiniteSupport,
    LinearCombo,
    PowerTail,
    SeqExpr,
    TruncatedVector,
    lin_combo,
    tail_power_bound,
    truncate,
)


def unit_basis_vector(n: int, p: PExponent) -> SeqExpr:
    """The n-th normalized geometric basis vector.

    Coordinates are a_n**(1/p) * n**(-k/p) for k >= 0 with a_n = (n-1)/n, and
    n**(-k) for the sup norm; the p-th powers telescope to a_n * n/(n-1) = 1,
    so the norm enclosure is exactly [1, 1].
    """
    if n < 2:
        raise ValueError(f"basis index must be at least 2, got {n}")
    if p.is_infinite:
        return PowerTail(ScalarExpr.one(), ScalarExpr.monomial(n, -1), start=1)
    a_n = Fraction(n - 1, n)
    inv_p = Fraction(1) / p.p
    return PowerTail(
        ScalarExpr.monomial(a_n, inv_p),
        ScalarExpr.monomial(n, -inv_p),
        start=1,
    )


class UnitBasisFamily:
    """The family {u_n : n >= 2} for a fixed exponent, built on demand."""

    __slots__ = ("p", "_members")

    def __init__(self, p: PExponent):
        self.p = p
        self._members: dict[int, SeqExpr] = {}

    def member(self, n: int) -> SeqExpr:
        u = self._members.get(n)
        if u is None:
            u = unit_basis_vector(n, self.p)
            self._members[n] = u
        return u

    def norm_enclosure(self, n: int, L: int = 64,
                       precision: int = DEFAULT_PRECISION) -> CertInterval:
        return p_norm(self.member(n), self.p, L, precision)


class OperatorRun:
    """Record of one truncated operator application."""

    __slots__ = ("input_kind", "input_seq", "n_terms", "window", "output",
                 "remainder_bound", "p", "precision")

    def __init__(self, input_kind: str, input_seq: SeqExpr, n_terms: int,
                 window: int, output: TruncatedVector,
                 remainder_bound: CertInterval, p: PExponent, precision: int):
        self.input_kind = input_kind
        self.input_seq = input_seq
        self.n_terms = n_terms
        self.window = window
        self.output = output
        self.remainder_bound = remainder_bound
        self.p = p
        self.precision = precision


def _weight_terms(weight: FormalSum, seq: SeqExpr) -> list[tuple[ScalarExpr, SeqExpr]]:
    return [(term, seq) for term in weight.terms]


def apply_bounded_operator(t: SeqExpr, N: int, L: int, p: PExponent,
                           precision: int = DEFAULT_PRECISION,
                           sup_bound: Fraction | None = None) -> OperatorRun:
    """Truncated image sum_{n=2}^{N} t_n 2**(-n) u_n with a certified remainder.

    The remainder bound is C**q * sum_{n>N} 2**(-qn) in closed form, where C
    is a certified sup bound for |t| (derived from t unless supplied) and q
    the correction exponent of p.
    """
    if N < 2:
        raise ValueError(f"need at least the n=2 term, got N={N}")
    if sup_bound is None:
        sup_bound = certified_sup(t, max(N, L), precision)
    family = UnitBasisFamily(p)
    terms: list[tuple[ScalarExpr, SeqExpr]] = []
    for n in range(2, N + 1):
        w = t.coord(n).scale(ScalarExpr.monomial(2, -n))
        terms.extend(_weight_terms(w, family.member(n)))
    image = lin_combo(terms)
    output = truncate(image, L, p, precision)

    q = p.q
    remainder = _geometric_weight_tail(Fraction(2), q, N, sup_bound, precision)
    return OperatorRun("bounded", t, N, L, output, remainder, p, precision)


def _geometric_weight_tail(base: Fraction, q: Fraction, N: int,
                           sup_bound: Fraction,
                           precision: int) -> CertInterval:
    """Enclosure of C**q * sum_{n>N} base**(-qn), exact when q is an integer."""
    if sup_bound == 0:
        return CertInterval.zero(precision)
    cq = ScalarExpr.from_rational(sup_bound).pow(q)
    ratio = ScalarExpr.monomial(base, -q)
    head = cq * ratio.pow(N + 1)
    r_val = ratio.as_rational()
    if r_val is not None:
        return eval_scalar(head.scale(Fraction(1) / (1 - r_val)), precision)
    num = eval_scalar(head, precision)
    den = CertInterval.from_rational(1, precision) - eval_scalar(ratio, precision)
    return num / den


def pointwise_family_member(x: SeqExpr, j: int) -> SeqExpr:
    """The j-th member of the pointwise family: coordinate n is j**(-n) x_n.

    j = 1 returns x itself. The transform is closed over all three sequence
    shapes, so laziness is preserved.
    """
    if j < 1:
        raise ValueError(f"family index must be positive, got {j}")
    if j == 1:
        return x
    return _pointwise_scale(x, j)


def _pointwise_scale(x: SeqExpr, j: int) -> SeqExpr:
    if isinstance(x, FiniteSupport):
        return FiniteSupport(
            (idx, v * ScalarExpr.monomial(j, -idx)) for idx, v in x.entries
        )
    if isinstance(x, PowerTail):
        return PowerTail(
            x.coefficient * ScalarExpr.monomial(j, -x.start),
            x.ratio * ScalarExpr.monomial(j, -1),
            x.start,
        )
    if isinstance(x, LinearCombo):
        return LinearCombo((w, _pointwise_scale(t, j)) for w, t in x.terms)
    raise TypeError(f"cannot scale sequence expression {x!r}")


def apply_summable_operator(t: SeqExpr, x: SeqExpr, N: int, L: int,
                            p: PExponent,
                            precision: int = DEFAULT_PRECISION) -> OperatorRun:
    """Truncated image sum_{j=1}^{N} t_j u_j over the pointwise family of x.

    The remainder bound scales the certified norm of x by the certified tail
    of the weights: sum_{j>N} |t_j| for p >= 1 (and sup), sum |t_j|**p below 1.
    """
    if N < 1:
        raise ValueError(f"need at least the j=1 term, got N={N}")
    terms: list[tuple[ScalarExpr, SeqExpr]] = []
    for j in range(1, N + 1):
        w = t.coord(j)
        terms.extend(_weight_terms(w, pointwise_family_member(x, j)))
    image = lin_combo(terms)
    output = truncate(image, L, p, precision)

    tail_exp = PExponent(p.q)
    weight_tail = tail_power_exact(t, N, tail_exp)
    if weight_tail is not None:
        tail_box = eval_sum(weight_tail, precision)
    else:
        tail_box = tail_power_bound(t, N, tail_exp, precision)
        if tail_box is None:
            raise UncertifiableTail(
                "no certified bound on the weight tail beyond N"
            )
    norm_x = p_norm(x, p, L, precision)
    prod = norm_x * tail_box
    remainder = CertInterval(CertInterval.zero(precision).lo, prod.hi, precision)
    return OperatorRun("summable", t, N, L, output, remainder, p, precision)


class ZeroAuditReport:
    """Partition of a window into structural zeros, certified nonzeros and
    indeterminate coordinates."""

    __slots__ = ("window", "certified_nonzero", "structural_zero", "indeterminate")

    def __init__(self, window: int, certified_nonzero: int,
                 structural_zero: list[int], indeterminate: list[int]):
        self.window = window
        self.certified_nonzero = certified_nonzero
        self.structural_zero = structural_zero
        self.indeterminate = indeterminate

    def counts(self) -> tuple[int, int, int]:
        return (self.certified_nonzero, len(self.structural_zero),
                len(self.indeterminate))


def zero_audit(v: TruncatedVector) -> ZeroAuditReport:
    """Classify every window coordinate of a truncated vector."""
    nonzero = 0
    zeros: list[int] = []
    indet: list[int] = []
    for k in range(1, v.length + 1):
        entry = v.coords[k - 1]
        if entry is None:
            zeros.append(k)
            continue
        _, box = entry
        if sign_certify(box) is Sign.CONTAINS_ZERO:
            indet.append(k)
        else:
            nonzero += 1
    return ZeroAuditReport(v.length, nonzero, zeros, indet)


class IndependenceResult:
    """Outcome of an independence check over a finite window."""

    __slots__ = ("verdict", "witness", "method")

    def __init__(self, verdict: Literal["independent", "dependent", "indeterminate"],
                 witness: tuple[Fraction, ...] | None, method: str):
        self.verdict = verdict
        self.witness = witness
        self.method = method

    def __repr__(self) -> str:
        return f"IndependenceResult({self.verdict}, method={self.method})"


def _rational_matrix(vectors: list[SeqExpr], L: int) -> list[list[Fraction]] | None:
    rows: list[list[Fraction]] = []
    for v in vectors:
        row: list[Fraction] = []
        for k in range(1, L + 1):
            q = v.coord(k).as_rational()
            if q is None:
                return None
            row.append(q)
        rows.append(row)
    return rows


def _rational_kernel(rows: list[list[Fraction]]) -> tuple[Fraction, ...] | None:
    """A nonzero left-kernel vector of the row matrix, or None if full rank.

    Plain fraction Gaussian elimination with a parallel combination ledger;
    the first row that reduces to zero hands back its combination.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    work = [list(r) for r in rows]
    comb: list[list[Fraction]] = [
        [Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)
    ]
    pivot_row = 0
    for col in range(n):
        sel = None
        for r in range(pivot_row, m):
            if work[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        work[pivot_row], work[sel] = work[sel], work[pivot_row]
        comb[pivot_row], comb[sel] = comb[sel], comb[pivot_row]
        piv = work[pivot_row][col]
        for r in range(pivot_row + 1, m):
            if work[r][col] == 0:
                continue
            f = work[r][col] / piv
            for c in range(col, n):
                work[r][c] -= f * work[pivot_row][c]
            for c in range(m):
                comb[r][c] -= f * comb[pivot_row][c]
        pivot_row += 1
        if pivot_row == m:
            break
    for r in range(m):
        if all(x == 0 for x in work[r]):
            return _normalize_witness(comb[r])
    return None


def _normalize_witness(weights: list[Fraction]) -> tuple[Fraction, ...]:
    """Scale to a primitive integer vector whose first nonzero entry is positive."""
    denom_lcm = 1
    for w in weights:
        if w != 0:
            denom_lcm = denom_lcm * w.denominator // _gcd(denom_lcm, w.denominator)
    ints = [w * denom_lcm for w in weights]
    g = 0
    for w in ints:
        g = _gcd(g, abs(int(w)))
    if g:
        ints = [w / g for w in ints]
    for w in ints:
        if w != 0:
            if w < 0:
                ints = [-x for x in ints]
            break
    return tuple(Fraction(x) for x in ints)


def _gcd(a: int, b: int) -> int:
    a, b = int(a), int(b)
    while b:
        a, b = b, a % b
    return a


def _symbolic_determinant(matrix: list[list[FormalSum]]) -> FormalSum:
    """Determinant over the formal-sum ring by subset dynamic programming.

    minors[mask] holds the determinant of the first popcount(mask) rows
    against the column set mask; the expansion sign is the parity of the row
    index plus the rank of the new column inside its mask.
    """
    n = len(matrix)
    minors: dict[int, FormalSum] = {0: FormalSum.of(1)}
    for row in range(n):
        nxt: dict[int, FormalSum] = {}
        for mask, val in minors.items():
            if val.is_zero():
                continue
            for col in range(n):
                bit = 1 << col
                if mask & bit:
                    continue
                entry = matrix[row][col]
                if entry.is_zero():
                    continue
                contrib = val * entry
                if (row + _popcount(mask & (bit - 1))) % 2:
                    contrib = -contrib
                key = mask | bit
                nxt[key] = nxt.get(key, FormalSum.zero()) + contrib
        minors = nxt
        if not minors:
            return FormalSum.zero()
    return minors.get((1 << n) - 1, FormalSum.zero())


def _popcount(x: int) -> int:
    return bin(x).count("1")


_MAX_SYMBOLIC_SIZE = 8


def _interval_rank_full(vectors: list[SeqExpr], L: int,
                        precision: int) -> bool:
    """True when interval Gaussian elimination certifies full row rank."""
    rows = [
        [eval_sum(v.coord(k), precision) for k in range(1, L + 1)]
        for v in vectors
    ]
    m = len(rows)
    pivot_row = 0
    for col in range(L):
        best = None
        best_mig = None
        for r in range(pivot_row, m):
            box = rows[r][col]
            if box.sign() is Sign.CONTAINS_ZERO:
                continue
            mig = min(abs(box.lo), abs(box.hi))
            if best is None or mig > best_mig:
                best, best_mig = r, mig
        if best is None:
            continue
        rows[pivot_row], rows[best] = rows[best], rows[pivot_row]
        piv = rows[pivot_row][col]
        for r in range(pivot_row + 1, m):
            f = rows[r][col] / piv
            rows[r] = [
                rows[r][c] - f * rows[pivot_row][c] for c in range(L)
            ]
        pivot_row += 1
        if pivot_row == m:
            return True
    return False


def independence_check(vectors: list[SeqExpr], L: int,
                       mode: Literal["exact", "interval"] = "exact",
                       precision: int = DEFAULT_PRECISION) -> IndependenceResult:
    """Decide linear independence of the window sections of the vectors.

    Exact mode reduces to rational linear algebra whenever every window entry
    is rational (yielding a kernel witness on dependence), falls back to a
    symbolic determinant for small irrational sections, and finally to
    certified interval elimination. Interval mode can only ever certify
    independence; anything else is indeterminate.
    """
    if not vectors:
        raise ValueError("need at least one vector")
    if L < len(vectors):
        raise ValueError(f"window {L} shorter than the family size {len(vectors)}")

    if mode == "exact":
        rows = _rational_matrix(vectors, L)
        if rows is not None:
            witness = _rational_kernel(rows)
            if witness is None:
                return IndependenceResult("independent", None, "exact-rational")
            return IndependenceResult("dependent", witness, "exact-rational")
        if len(vectors) <= _MAX_SYMBOLIC_SIZE:
            n = len(vectors)
            section = [
                [v.coord(k) for k in range(1, n + 1)] for v in vectors
            ]
            det = _symbolic_determinant(section)
            if not det.is_zero():
                return IndependenceResult("independent", None, "exact-symbolic")
        # exact reduction could not decide; fall through to intervals

    if _interval_rank_full(vectors, L, precision):
        return IndependenceResult("independent", None, "interval")
    return IndependenceResult("indeterminate", None, "interval")
