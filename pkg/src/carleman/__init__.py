"""Certified weight-sequence algebra for Denjoy-Carleman classes.

The package has five parts:

* :mod:`carleman.sequences` / :mod:`carleman.criteria`: weight-sequence
  families evaluated as log-space enclosures, the quasianalyticity /
  log-convexity / derivation-closure / inclusion criteria, and the index
  dilation M_n -> M_{pn};
* :mod:`carleman.coefficients`: the exact rational oracle for the
  log-power coefficients, the root-substitution series, and the elementary
  factorial inequality;
* :mod:`carleman.bang`: the extremal cosine series with certified
  derivative bounds at the origin;
* :mod:`carleman.substitution`: coefficient-level and assembled
  verification of the power-substitution bound;
* :mod:`carleman.cli` / :mod:`carleman.reporting`: the batch command line
  with machine-readable, byte-reproducible reports.
"""

from ._version import __version__
from .errors import (
    CarlemanError,
    EnumerationCapError,
    IndexRangeError,
    PrecisionExhaustedError,
    SpecFormatError,
    TailUncertifiedError,
)
from .intervals import LinearEnclosure, LogReal, SignedEnclosure, working_precision
from .outcomes import CheckReport, EvidenceRow, Outcome, Reason, Verdict
from .sequences import (
    BoundCertificate,
    SequenceSpec,
    WeightSequence,
    load_spec,
    power_substitute,
)

__all__ = [
    "__version__",
    "BoundCertificate",
    "CarlemanError",
    "CheckReport",
    "EnumerationCapError",
    "EvidenceRow",
    "IndexRangeError",
    "LinearEnclosure",
    "LogReal",
    "Outcome",
    "PrecisionExhaustedError",
    "Reason",
    "SequenceSpec",
    "SignedEnclosure",
    "SpecFormatError",
    "TailUncertifiedError",
    "Verdict",
    "WeightSequence",
    "load_spec",
    "power_substitute",
    "working_precision",
]
