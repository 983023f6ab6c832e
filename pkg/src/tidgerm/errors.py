"""Typed errors raised by the symbolic and numeric pipelines.

Every error that signals "the requested computation does not apply to this
input" derives from :class:`InapplicableError`; the command line maps those
to exit status 2.
"""

from __future__ import annotations


class TidgermError(Exception):
    """Root of the package's exception hierarchy."""


class InapplicableError(TidgermError):
    """The input does not satisfy the preconditions of the operation."""


# --------------------------------------------------------------------------
# algebra
# --------------------------------------------------------------------------


class ZeroDivisorSplit(TidgermError):
    """A zero-divisor was met in an algebraic level defined by a reducible
    polynomial.

    Attributes
    ----------
    level : AlgebraicLevel
        The level whose defining polynomial splits.
    factors : tuple of tuple
        Coefficient tuples (lowest degree first, over the parent level) of
        monic, pairwise coprime factors whose product is the defining
        polynomial.  The caller re-runs its computation once per factor.
    """

    def __init__(self, level, factors):
        self.level = level
        self.factors = tuple(factors)
        degrees = ", ".join(str(len(f) - 1) for f in self.factors)
        super().__init__(f"defining polynomial of {level.name} splits (factor degrees {degrees})")


class DivisionByZero(TidgermError, ZeroDivisionError):
    """Inversion of an element that is zero in the current branch."""


class NotSquarefree(InapplicableError):
    """An algebraic extension was requested with a non-squarefree polynomial."""


class InsufficientPrecision(TidgermError):
    """A coefficient beyond the certified precision of a jet was needed."""


# --------------------------------------------------------------------------
# germs / blow-ups
# --------------------------------------------------------------------------


class DicriticalMap(InapplicableError):
    """Every direction is characteristic: x q_{k+1} - y p_{k+1} vanishes."""


class NotTangentToIdentity(InapplicableError):
    """The map is not of the form identity plus higher-order terms."""


class NotInvariantDirection(InapplicableError):
    """The blow-up centre is not fixed by the lifted map."""


class NotExact(InapplicableError):
    """An operation needs exact polynomial (or rational) data, not a jet."""


class DepthExceeded(TidgermError):
    """Resolution did not terminate within the configured depth."""


class SeparatrixNotStrict(InapplicableError):
    """The requested curve is not a strict separatrix of the field."""


class PropertyViolation(TidgermError):
    """An index identity failed; carries the offending node."""

    def __init__(self, message, node=None):
        self.node = node
        super().__init__(message)


# --------------------------------------------------------------------------
# classifier
# --------------------------------------------------------------------------


class NotCharacteristic(InapplicableError):
    """The requested direction is not characteristic for the map."""


class CertificateIncomplete(InapplicableError):
    """A pure-domain certificate could not be completed."""


class IndexZero(InapplicableError):
    """The residual index along the divisor vanishes."""


class Dicritical(InapplicableError):
    """The infinitesimal generator is dicritical."""


class CornerPoint(InapplicableError):
    """The studied point lies on two fixed components."""


class NotTangential(InapplicableError):
    """The fixed divisor is not a strict separatrix of the generator."""


# --------------------------------------------------------------------------
# numerics
# --------------------------------------------------------------------------


class Escape(InapplicableError):
    """An orbit left the ball of the configured escape radius."""

    def __init__(self, message, orbit=None):
        self.orbit = orbit
        super().__init__(message)


class NotConvergent(InapplicableError):
    """An orbit (or one of its lifts) does not converge."""


class ShapeMismatch(InapplicableError):
    """A numeric check was given a shape inconsistent with the map."""


class ParseError(TidgermError):
    """Malformed germ description; carries a line and column."""

    def __init__(self, message, line=0, col=0, source="<input>"):
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {message}")
