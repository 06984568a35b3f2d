"""Exception types raised by the simulation layers.

``DomainError`` subclasses mark physically/numerically invalid states
discovered during a computation; plain ``ValueError`` is reserved for
malformed arguments. The CLI maps the two onto distinct exit codes.
"""


class DomainError(Exception):
    """A computation entered an invalid physical or numerical regime."""


class VoltageRangeError(DomainError):
    """Requested voltage lies outside the tabulated response range."""


class DegenerateLevelsError(DomainError):
    """PAM-4 levels are degenerate (e.g. top equals bottom)."""


class MetricDomainError(DomainError):
    """A dB metric was requested for nonpositive power levels."""


class ResonanceSearchError(DomainError):
    """Resonance search failed: no minimum, several minima, or bad window."""


class InsufficientDataError(DomainError):
    """Too few samples per symbol level for reliable eye statistics."""


class EmptyWindowError(DomainError):
    """An operation on a qualifying wavelength window found it empty."""
