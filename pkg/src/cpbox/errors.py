"""Exception hierarchy for cpbox."""

from __future__ import annotations


class CpboxError(Exception):
    """Base class for all domain errors raised by this package."""


class DimMismatch(CpboxError, ValueError):
    pass


class NonHermitianInput(CpboxError, ValueError):
    pass


class TopologyMismatch(CpboxError, ValueError):
    pass


class NonDegenerateOffset(CpboxError, ValueError):
    pass


class ArityTooLarge(CpboxError, ValueError):
    pass


class NonCanonical(CpboxError, ValueError):
    pass


class UnclassifiableInput(CpboxError, ValueError):
    pass


class NonAdjacentPair(CpboxError, ValueError):
    pass


class NoTemplateMatch(CpboxError, RuntimeError):
    pass


class PromiseViolation(CpboxError, ValueError):
    """The oracle is neither constant nor balanced."""


class BadBracket(CpboxError, ValueError):
    """Bracket does not satisfy f(mid) < min(f(left), f(right))."""
