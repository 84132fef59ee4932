"""Exception and warning types shared across the package.

Exceptions carry the name of the violated contract rather than the name of
the caller, so the same class can be raised from several entry points.
"""

from __future__ import annotations


class InfoflowError(Exception):
    """Base class for all errors raised by this package."""


class ZeroTotalCount(InfoflowError):
    """A count collection holds no mass, so it cannot be normalized."""


class TupleOutOfRange(InfoflowError):
    """A symbol tuple does not fit the declared axis arities."""


class EmptyAxisSet(InfoflowError):
    """An axis selection that must be nonempty is empty."""


class OverlappingAxisSets(InfoflowError):
    """Axis selections that must be disjoint share a position."""


class TooFewParts(InfoflowError):
    """A multivariate measure needs at least two parts."""


class AbsoluteContinuityViolation(InfoflowError):
    """The reference distribution assigns zero mass where the left one does not."""


class IndexOutOfRange(InfoflowError):
    """A lattice index names a time step outside the system horizon."""


class SystemTooLarge(InfoflowError):
    """Exhaustive evaluation was requested for a tuple space above the guard."""


class SelfPair(InfoflowError):
    """A directed pair statistic was requested with source == target."""


class SeriesTooShort(InfoflowError):
    """A series does not contain a single complete window."""


class ShapeMismatch(InfoflowError):
    """Two containers that must agree in shape or labeling do not."""


class NTooLarge(InfoflowError):
    """A combinatorial enumeration was requested above its size guard."""


class UnfittedNull(InfoflowError):
    """A parametric tail was requested from a null without a fitted model."""


class DivergedTrajectory(InfoflowError):
    """Numerical integration produced a non-finite state."""


class OutOfDomain(InfoflowError):
    """A map was evaluated outside its closed domain."""


class InputDataError(InfoflowError):
    """An external data file is malformed or inconsistent."""


class ConstantSeries(UserWarning):
    """A variable is constant, so its median split is degenerate."""


class DegenerateNull(UserWarning):
    """A surrogate population carries no variance; the parametric fit is skipped."""

