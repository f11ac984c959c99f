"""Exception hierarchy for certified-computation failures.

Every exception here means "could not certify", never "the mathematical
claim is false". Callers that want a verdict rather than an exception
should catch SeqspaceError and report indeterminate.
"""


class SeqspaceError(Exception):
    """Base class for all library-specific failures."""


class PrecisionTooCoarse(SeqspaceError):
    """Working precision below the minimum needed to certify anything."""


class UncertifiableTail(SeqspaceError):
    """No closed-form tail bound applies to the sequence beyond the window."""


class UncertifiableSup(SeqspaceError):
    """No certified supremum bound is available for a bounded-input operator."""


class KTooSmall(SeqspaceError):
    """Decay exponent does not satisfy the k > 2 hypothesis."""


class WitnessExhausted(SeqspaceError):
    """No probe index certified the target bound; raise precision or the probe limit."""


class DependentInput(SeqspaceError):
    """Vectors required to be linearly independent are dependent on the window."""


class IndeterminateLeading(SeqspaceError):
    """A leading coordinate's value could not be decided exactly."""


class IndeterminateWindow(SeqspaceError):
    """The inspection window is too short to certify the requested property."""


class ReductionFailed(SeqspaceError):
    """Exact-mode reduction could not rationalize the coordinate section."""


class NoCommonZeros(SeqspaceError):
    """The input family has no common structural zero inside the window."""


class WindowExhausted(SeqspaceError):
    """The construction needs coordinates beyond the configured window."""


class OracleFailure(SeqspaceError):
    """A subspace oracle could not supply a vector meeting its constraints."""


class ZDenominatorIndeterminate(SeqspaceError):
    """The denominator coordinate in a scale choice could not be certified nonzero."""
