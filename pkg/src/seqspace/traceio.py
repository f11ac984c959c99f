"""Exact JSON wire forms for traces and collapse runs.

All scalars serialize as exact text: rationals as 'num/den' strings,
monomials as signed factor lists, interval endpoints as the exact dyadic
rationals of their binary floats. Round-trips are bit-exact, which is what
makes replayed verification meaningful.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpq

from .builder import (
    CollapseEntry,
    CollapseResult,
    ConstructionTrace,
    Correction,
    TraceOutput,
    TraceStep,
)
from .exact import (
    ScalarExpr,
    format_rational,
    parse_rational,
    scalar_from_json,
    scalar_to_json,
)
from .exponents import PExponent
from .interval import CertInterval, _dn, _up
from .seq import seq_from_json, seq_to_json, truncate

TRACE_SCHEMA = "seqspace-trace/1"
COLLAPSE_SCHEMA = "seqspace-collapse/1"


def interval_to_json(box: CertInterval) -> dict:
    lo = mpq(box.lo)
    hi = mpq(box.hi)
    return {
        "lo": f"{lo.numerator}/{lo.denominator}",
        "hi": f"{hi.numerator}/{hi.denominator}",
        "precision": box.precision,
    }


def interval_from_json(obj: dict) -> CertInterval:
    prec = int(obj["precision"])
    lo = mpq(obj["lo"])
    hi = mpq(obj["hi"])
    zero = gmpy2.mpfr(0, prec)
    return CertInterval(_dn(prec).add(zero, lo), _up(prec).add(zero, hi), prec)


def _opt_scalar(s: ScalarExpr | None) -> dict | None:
    return None if s is None else scalar_to_json(s)


def _opt_seq(s) -> dict | None:
    return None if s is None else seq_to_json(s)


def trace_to_json(trace: ConstructionTrace) -> dict:
    return {
        "schema": TRACE_SCHEMA,
        "kind": trace.kind,
        "p": str(trace.p),
        "precision": trace.precision,
        "window": trace.window,
        "eps_base": format_rational(trace.eps_base),
        "m_start": trace.m_start,
        "oracle": trace.oracle_desc,
        "forbidden": sorted(trace.forbidden),
        "m_floors": list(trace.m_floors),
        "steps": [
            {
                "k": st.k,
                "m": st.m,
                "r": st.r,
                "seeded": st.seeded,
                "sigma": scalar_to_json(st.sigma),
                "v": seq_to_json(st.v),
                "eps": None if st.eps is None else format_rational(st.eps),
                "lambda": _opt_scalar(st.lam),
                "z": _opt_seq(st.z),
                "u": _opt_seq(st.u),
            }
            for st in trace.steps
        ],
        "corrections": [
            {
                "chain": c.chain,
                "j": c.j,
                "target": c.target,
                "coeff": scalar_to_json(c.coeff),
                "eps_bound": format_rational(c.eps_bound),
            }
            for c in trace.corrections
        ],
        "outputs": [
            {
                "k": o.k,
                "pivot": o.pivot,
                "y": seq_to_json(o.y),
                "limit_gap": interval_to_json(o.limit_gap),
            }
            for o in trace.outputs
        ],
        "notes": trace.notes,
    }


def trace_from_json(obj: dict) -> ConstructionTrace:
    if obj.get("schema") != TRACE_SCHEMA:
        raise ValueError(f"not a {TRACE_SCHEMA} document")
    p = PExponent.parse(obj["p"])
    precision = int(obj["precision"])
    window = int(obj["window"])
    steps = [
        TraceStep(
            int(s["k"]), int(s["m"]), int(s["r"]),
            scalar_from_json(s["sigma"]),
            seq_from_json(s["v"]),
            eps=None if s["eps"] is None else parse_rational(s["eps"]),
            lam=None if s["lambda"] is None else scalar_from_json(s["lambda"]),
            z=None if s["z"] is None else seq_from_json(s["z"]),
            u=None if s["u"] is None else seq_from_json(s["u"]),
            seeded=bool(s.get("seeded", False)),
        )
        for s in obj["steps"]
    ]
    corrections = [
        Correction(
            int(c["chain"]), int(c["j"]), int(c["target"]),
            scalar_from_json(c["coeff"]), parse_rational(c["eps_bound"]),
        )
        for c in obj["corrections"]
    ]
    outputs = []
    for o in obj["outputs"]:
        y = seq_from_json(o["y"])
        outputs.append(TraceOutput(
            int(o["k"]), int(o["pivot"]), y,
            truncate(y, window, p, precision),
            interval_from_json(o["limit_gap"]),
        ))
    return ConstructionTrace(
        obj["kind"], p, precision, window,
        parse_rational(obj["eps_base"]), int(obj["m_start"]),
        dict(obj["oracle"]), frozenset(int(x) for x in obj["forbidden"]),
        tuple(int(x) for x in obj["m_floors"]),
        steps, corrections, outputs, dict(obj.get("notes", {})),
    )


def collapse_to_json(result: CollapseResult) -> dict:
    return {
        "schema": COLLAPSE_SCHEMA,
        "p": str(result.p),
        "precision": result.precision,
        "window": result.window,
        "seed": seq_to_json(result.seed),
        "entries": [
            {
                "n": e.n,
                "m": e.m,
                "r": e.r,
                "trace": trace_to_json(e.trace),
                "distance": interval_to_json(e.distance_bound),
                "distance_upper": format_rational(e.distance_upper),
                "schedule_total": interval_to_json(e.schedule_total),
            }
            for e in result.entries
        ],
        "notes": result.notes,
    }


def collapse_from_json(obj: dict) -> CollapseResult:
    if obj.get("schema") != COLLAPSE_SCHEMA:
        raise ValueError(f"not a {COLLAPSE_SCHEMA} document")
    p = PExponent.parse(obj["p"])
    precision = int(obj["precision"])
    window = int(obj["window"])
    seed = seq_from_json(obj["seed"])
    entries = []
    for e in obj["entries"]:
        trace = trace_from_json(e["trace"])
        entries.append(CollapseEntry(
            int(e["n"]), int(e["m"]), int(e["r"]), trace,
            trace.outputs[0],
            interval_from_json(e["distance"]),
            parse_rational(e["distance_upper"]),
            interval_from_json(e["schedule_total"]),
        ))
    return CollapseResult(seed, entries, p, precision, window,
                          dict(obj.get("notes", {})))
