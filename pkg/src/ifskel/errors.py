"""Exception hierarchy shared by all ifskel modules."""

from __future__ import annotations


class IfskelError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IfskelError):
    """An input object violates a documented invariant.

    The message starts with the offending field path, e.g. ``maps[2].scale``.
    """


class ParseError(IfskelError):
    """An input file could not be read or decoded."""


class CapExceeded(IfskelError):
    """A configured enumeration cap would be exceeded."""


class ScaleOne(IfskelError):
    """A fixed point was requested for a map with scale 1."""


class NotStable(IfskelError):
    """A point set is not stable under the IFS at the given tolerance."""


class NotSingleMatrix(IfskelError):
    """The IFS maps do not share a single linear part."""


class NotConnected(IfskelError):
    """The Hata graph is disconnected, so the attractor is disconnected."""


class Inconclusive(IfskelError):
    """Neighbor graph exploration hit its cap; no finite-type verdict."""


class NoWalk(IfskelError):
    """No eventually periodic walk could be found from the start vertex."""


class DegenerateCycle(IfskelError):
    """A walk cycle feeds letters into only one side of a coding pair."""
