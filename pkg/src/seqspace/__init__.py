"""Certified finite-truncation computation in scalar sequence spaces.

The package splits into an exact symbolic layer (rational-power monomials and
formal sums), an outward-rounded interval layer, lazy sequence expressions
with structural-zero tracking, certified p-norm and tail-decay machinery, and
a construction engine that emits replayable JSON trace certificates.
"""

__version__ = "0.1.0"

from .exact import FormalSum, Rational, ScalarExpr, format_rational, parse_rational
from .interval import (
    DEFAULT_PRECISION,
    CertInterval,
    Sign,
    eval_scalar,
    eval_sum,
    pow_enclose,
    sign_certify,
)

__all__ = [
    "__version__",
    "Rational",
    "ScalarExpr",
    "FormalSum",
    "parse_rational",
    "format_rational",
    "CertInterval",
    "Sign",
    "pow_enclose",
    "eval_scalar",
    "eval_sum",
    "sign_certify",
    "DEFAULT_PRECISION",
]
