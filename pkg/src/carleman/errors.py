"""Exception hierarchy for the carleman package."""

from __future__ import annotations


class CarlemanError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionExhaustedError(CarlemanError):
    """The working precision cannot represent or separate the requested values.

    Raised instead of silently wrapping or returning garbage, e.g. when an
    enclosure would exceed the supported exponent range, or when an integer
    threshold cannot be isolated from a certified enclosure.
    """


class IndexRangeError(CarlemanError):
    """A sequence index is outside the configured range for this sequence."""


class EnumerationCapError(CarlemanError):
    """A brute-force enumeration was requested beyond its configured cap."""


class TailUncertifiedError(CarlemanError):
    """A truncation-tail bound is unavailable because its prerequisite
    (ratio monotonicity from log-convexity) is not certified for the sequence."""


class SpecFormatError(CarlemanError):
    """A sequence-spec document is malformed or violates a spec invariant."""
