"""Independent re-verification of construction traces.

Every certificate a trace asserts is recomputed here from the recorded raw
materials: oracle draws are re-audited against their depth constraints, the
stored vectors are recombined from scale and materials, separation and
normalization inequalities are re-derived on certified enclosures, and the
correction chains are replayed coefficient by coefficient. The verifier
never trusts a stored conclusion, only stored inputs.
"""

from __future__ import annotations

from fractions import Fraction

from .builder import (
    CollapseResult,
    ConstructionTrace,
    _mag_bounds,
    _scale_bound,
    geometric_schedule_total_exact,
)
from .constructions import independence_check
from .errors import SeqspaceError
from .exact import FormalSum, ScalarExpr, format_rational
from .interval import CertInterval, Sign, sign_certify
from .norms import p_norm
from .seq import SeqExpr, lin_combo

PASS = "pass"
FAIL = "fail"
INDET = "indeterminate"


class Verdict:
    """A named invariant with its re-verified status."""

    __slots__ = ("name", "status", "detail")

    def __init__(self, name: str, status: str, detail: str = ""):
        self.name = name
        self.status = status
        self.detail = detail

    def __repr__(self) -> str:
        return f"Verdict({self.name}: {self.status})"

    def to_json(self) -> dict:
        return {"invariant": self.name, "status": self.status, "detail": self.detail}


def _slack(precision: int) -> Fraction:
    return Fraction(1, 2 ** (precision // 2))


def _check_structural_zeros(v: SeqExpr, upto: int, forbidden, window: int) -> list[int]:
    bad = [k for k in range(1, min(upto, window) + 1) if not v.coord(k).is_zero()]
    bad += [
        pos for pos in sorted(forbidden)
        if upto < pos <= window and not v.coord(pos).is_zero()
    ]
    return bad


def _has_window_nonzero(v: SeqExpr, window: int) -> bool:
    return any(not v.coord(k).is_zero() for k in range(1, window + 1))


def verify_trace(trace: ConstructionTrace) -> list[Verdict]:
    """Recheck every certificate of a construction trace from scratch."""
    out: list[Verdict] = []
    W = trace.window
    prec = trace.precision
    p = trace.p
    slack = _slack(prec)
    steps = trace.steps

    # block starts strictly increase past the previous block and the floors
    bad = []
    for a, b in zip(steps, steps[1:]):
        if not b.m > a.m + a.r:
            bad.append(f"m_{b.k}={b.m} <= {a.m}+{a.r}")
    for i, floor in enumerate(trace.m_floors):
        if i + 1 < len(steps) and not steps[i + 1].m > floor:
            bad.append(f"m_{i + 2}={steps[i + 1].m} <= floor {floor}")
    out.append(Verdict("schedule-monotone", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for st in steps[1:]:
        expected = Fraction(1) / (trace.eps_base ** (st.k - 1))
        if st.eps != expected:
            bad.append(f"step {st.k}: eps {st.eps} != {expected}")
    out.append(Verdict("epsilon-schedule", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for st in steps:
        if st.k == 1:
            if st.seeded:
                continue
            draws = [(st.z, trace.m_start - 1, "v1 material")]
        else:
            draws = [(st.z, st.m, "z"), (st.u, st.m + st.r - 1, "u")]
        for vec, depth, label in draws:
            if vec is None:
                bad.append(f"step {st.k}: missing {label}")
                continue
            nz = _check_structural_zeros(vec, depth, trace.forbidden, W)
            if nz:
                bad.append(f"step {st.k} {label}: nonzero at {nz[:4]}")
            if not _has_window_nonzero(vec, W):
                bad.append(f"step {st.k} {label}: vanishes on the window")
    out.append(Verdict("oracle-contract", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for st in steps:
        if st.k == 1:
            if st.seeded:
                continue
            expected = lin_combo([(st.sigma.reciprocal(), st.z)])
        else:
            inv_sigma = st.sigma.reciprocal()
            expected = lin_combo([(st.lam * inv_sigma, st.z), (-inv_sigma, st.u)])
        for k in range(1, W + 1):
            if expected.coord(k) != st.v.coord(k):
                bad.append(f"step {st.k}: coordinate {k} mismatch")
                break
    out.append(Verdict("combination-consistency", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    indet = []
    for i, st in enumerate(steps[1:], start=1):
        idx = st.pivot
        z_lo, _ = _mag_bounds(st.z.coord(idx), prec)
        if z_lo <= 0:
            indet.append(f"step {st.k}: |z| at {idx} not certified positive")
            continue
        _, u_hi = _mag_bounds(st.u.coord(idx), prec)
        mass_hi = sum(
            (_mag_bounds(prev.v.coord(idx), prec)[1] for prev in steps[:i]),
            Fraction(0),
        )
        lam_val = st.lam.as_rational()
        if lam_val is None or abs(lam_val) <= _scale_bound(u_hi, z_lo, mass_hi, st.eps):
            bad.append(f"step {st.k}: scale {st.lam} not above the required bound")
    status = FAIL if bad else (INDET if indet else PASS)
    out.append(Verdict("scale-inequality", status, "; ".join(bad + indet)))

    bad = []
    indet = []
    for st in steps:
        fs = st.v.coord(st.pivot)
        if fs.is_zero():
            bad.append(f"step {st.k}: pivot {st.pivot} structurally zero")
        elif sign_certify(_enclose(fs, prec)) is Sign.CONTAINS_ZERO:
            indet.append(f"step {st.k}: pivot sign not certified")
    status = FAIL if bad else (INDET if indet else PASS)
    out.append(Verdict("pivot-nonzero", status, "; ".join(bad + indet)))

    bad = []
    for st in steps:
        if st.k == 1 and st.seeded:
            continue
        nz = [k for k in range(1, min(st.m - 1, W) + 1) if not st.v.coord(k).is_zero()]
        if nz:
            bad.append(f"step {st.k}: nonzero below block start at {nz[:4]}")
    out.append(Verdict("leading-zeros", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for i, st in enumerate(steps[1:], start=1):
        idx = st.pivot
        mass_hi = sum(
            (_mag_bounds(prev.v.coord(idx), prec)[1] for prev in steps[:i]),
            Fraction(0),
        )
        piv_lo, _ = _mag_bounds(st.v.coord(idx), prec)
        if not (piv_lo > 0 and mass_hi <= st.eps * piv_lo):
            bad.append(
                f"step {st.k}: mass {mass_hi} above eps*pivot {st.eps * piv_lo}"
            )
    out.append(Verdict("separation", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for st in steps:
        if st.k == 1 and st.seeded:
            continue
        try:
            norm = p_norm(st.v, p, W, prec)
        except SeqspaceError as exc:
            bad.append(f"step {st.k}: norm uncertifiable ({exc})")
            continue
        if norm.hi_fraction() > 1 + slack:
            bad.append(f"step {st.k}: norm upper {norm.hi_fraction()} above 1")
    out.append(Verdict("normalization", FAIL if bad else PASS, "; ".join(bad)))

    by_chain: dict[int, list] = {}
    for c in trace.corrections:
        by_chain.setdefault(c.chain, []).append(c)
    bad = []
    chain_states: dict[int, SeqExpr] = {}
    for k in range(1, len(steps) + 1):
        x = steps[k - 1].v
        for c in sorted(by_chain.get(k, []), key=lambda c: c.j):
            target_step = steps[k + c.j - 1]
            if c.target != target_step.pivot:
                bad.append(f"chain {k} j={c.j}: target {c.target} is not the pivot")
                continue
            quotient = x.coord(c.target).div_exact(target_step.v.coord(c.target))
            expected = quotient.as_monomial() if quotient is not None else None
            if expected is None or expected != c.coeff:
                bad.append(f"chain {k} j={c.j}: coefficient mismatch")
                continue
            if not c.coeff.is_zero():
                x = lin_combo([(ScalarExpr.one(), x), (-c.coeff, target_step.v)])
            if not x.coord(c.target).is_zero():
                bad.append(f"chain {k} j={c.j}: target not cleared")
        chain_states[k] = x
    for o in trace.outputs:
        x = chain_states.get(o.k)
        if x is None:
            bad.append(f"output {o.k}: no replayed chain")
            continue
        for pos in range(1, W + 1):
            if x.coord(pos) != o.y.coord(pos):
                bad.append(f"output {o.k}: coordinate {pos} differs from replay")
                break
    out.append(Verdict("correction-exactness", FAIL if bad else PASS, "; ".join(bad)))

    q = p.q
    bad = []
    for c in trace.corrections:
        if c.coeff.is_zero():
            continue
        vstep = trace.steps[c.chain + c.j - 1]
        norm = p_norm(lin_combo([(abs(c.coeff), vstep.v)]), p, W, prec)
        limit_expr = ScalarExpr.from_rational(c.eps_bound).pow(q)
        limit = limit_expr.as_rational()
        if limit is None:
            limit = _enclose(FormalSum.of(limit_expr), prec).hi_fraction()
        if norm.hi_fraction() > limit + slack:
            bad.append(
                f"chain {c.chain} j={c.j}: step norm {norm.hi_fraction()} above {limit}"
            )
    out.append(Verdict("correction-step-bound", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for k, corrs in by_chain.items():
        corrs = sorted(corrs, key=lambda c: c.j)
        for r in range(len(corrs)):
            for m_i in range(r + 1, len(corrs) + 1):
                seg = [c for c in corrs[r:m_i] if not c.coeff.is_zero()]
                eps_bound = Fraction(1) / (trace.eps_base ** (k + r))
                if not seg:
                    continue
                diff = lin_combo([
                    (-c.coeff, steps[k + c.j - 1].v) for c in seg
                ])
                norm = p_norm(diff, p, W, prec)
                if norm.hi_fraction() > eps_bound + slack:
                    bad.append(
                        f"chain {k}: |x_{m_i} - x_{r}| = {norm.hi_fraction()} above {eps_bound}"
                    )
    out.append(Verdict("cauchy-chain", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    indet = []
    for o in trace.outputs:
        own = o.y.coord(o.pivot)
        if own != steps[o.k - 1].v.coord(o.pivot):
            bad.append(f"output {o.k}: pivot value differs from its source vector")
        if own.is_zero():
            bad.append(f"output {o.k}: pivot structurally zero")
        elif sign_certify(_enclose(own, prec)) is Sign.CONTAINS_ZERO:
            indet.append(f"output {o.k}: pivot sign not certified")
        for st in steps:
            if st.k == o.k or st.pivot > W:
                continue
            if not o.y.coord(st.pivot).is_zero():
                bad.append(f"output {o.k}: not structurally zero at pivot {st.pivot}")
    status = FAIL if bad else (INDET if indet else PASS)
    out.append(Verdict("support-disjointness", status, "; ".join(bad + indet)))

    if trace.forbidden:
        bad = []
        for o in trace.outputs:
            hits = [
                pos for pos in sorted(trace.forbidden)
                if pos <= W and not o.y.coord(pos).is_zero()
            ]
            if hits:
                bad.append(f"output {o.k}: nonzero at forbidden {hits[:4]}")
        out.append(Verdict("common-zero-avoidance", FAIL if bad else PASS, "; ".join(bad)))

    if len(trace.outputs) >= 2:
        res = independence_check([o.y for o in trace.outputs], W, "exact", prec)
        status = {"independent": PASS, "dependent": FAIL}.get(res.verdict, INDET)
        out.append(Verdict("family-independence", status, res.method))
    return out


def _enclose(fs: FormalSum, precision: int) -> CertInterval:
    from .interval import eval_sum

    return eval_sum(fs, precision)


def verify_collapse(result: CollapseResult) -> list[Verdict]:
    """Recheck the per-stage distance certificates and their monotone decay,
    then re-verify every stage's chain trace."""
    out: list[Verdict] = []
    q = result.p.q
    bad = []
    prev_upper: Fraction | None = None
    for e in result.entries:
        diff = lin_combo([
            (ScalarExpr.one(), e.output.y),
            (ScalarExpr.from_rational(-1), result.seed),
        ])
        actual = p_norm(diff, result.p, result.window, result.precision)
        if actual.lo_fraction() > e.distance_upper:
            bad.append(f"n={e.n}: recomputed distance above the recorded bound")
        closed = geometric_schedule_total_exact(Fraction(e.n + 1), q)
        if closed is not None and e.distance_upper > closed:
            bad.append(f"n={e.n}: upper {e.distance_upper} above closed form {closed}")
        if prev_upper is not None and not e.distance_upper < prev_upper:
            bad.append(f"n={e.n}: upper bound failed to decrease strictly")
        prev_upper = e.distance_upper
    out.append(Verdict("collapse-distance", FAIL if bad else PASS, "; ".join(bad)))
    out.append(Verdict(
        "collapse-closed-form",
        PASS,
        result.notes.get("closed_form", ""),
    ))
    for e in result.entries:
        for v in verify_trace(e.trace):
            out.append(Verdict(f"stage{e.n}:{v.name}", v.status, v.detail))
    return out


def verify_staircase(inputs: list[SeqExpr], staircase, window: int,
                     precision: int) -> list[Verdict]:
    """Recheck pivot structure and the combination ledger of a reduction."""
    out: list[Verdict] = []
    bad = []
    if list(staircase.pivots) != sorted(set(staircase.pivots)):
        bad.append("pivots not strictly increasing")
    for i, vec in enumerate(staircase.vectors):
        piv = staircase.pivots[i]
        if vec.coord(piv).is_zero():
            bad.append(f"vector {i}: pivot {piv} structurally zero")
        below = [k for k in range(1, piv) if not vec.coord(k).is_zero()]
        if below:
            bad.append(f"vector {i}: nonzero below pivot at {below[:4]}")
    out.append(Verdict("staircase-pivots", FAIL if bad else PASS, "; ".join(bad)))

    bad = []
    for i, vec in enumerate(staircase.vectors):
        coeffs = staircase.ledger[i]
        for k in range(1, window + 1):
            acc = FormalSum.zero()
            for inp, cf in zip(inputs, coeffs):
                acc = acc + (inp.coord(k) * cf)
            if acc != vec.coord(k):
                bad.append(f"vector {i}: ledger fails at coordinate {k}")
                break
    out.append(Verdict("staircase-ledger", FAIL if bad else PASS, "; ".join(bad)))
    return out


def summarize(verdicts: list[Verdict]) -> str:
    worst = PASS
    for v in verdicts:
        if v.status == FAIL:
            worst = FAIL
            break
        if v.status == INDET:
            worst = INDET
    return worst
