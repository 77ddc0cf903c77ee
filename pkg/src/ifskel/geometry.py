"""Planar similitudes: composition, inversion, fixed points, canonical keys.

A similitude is stored as (scale, angle, reflect, translation) and applied to
points through its complex linear part ``a = scale * exp(i*angle)``:

    f(z) = a * z + t          when reflect is False
    f(z) = a * conj(z) + t    when reflect is True

Keeping the linear part as a single complex number (instead of a 2x2 matrix)
makes orthogonality exact by construction and keeps composition cheap, which
matters in the neighbor-graph search where hundreds of thousands of maps are
composed and deduplicated.
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

from .errors import ScaleOne

TWO_PI = 2.0 * math.pi

# Tolerance under which a map counts as non-contracting for fixed points.
_SCALE_ONE_TOL = 1e-12


class Point(NamedTuple):
    """A point of the plane."""

    x: float
    y: float

    def as_complex(self) -> complex:
        return complex(self.x, self.y)

    @staticmethod
    def of(z: complex) -> "Point":
        return Point(z.real, z.imag)


CanonicalKey = tuple[int, int, int, int, int]


class Similitude:
    """An orientation preserving or reversing planar similarity map."""

    __slots__ = ("scale", "reflect", "a", "t")

    def __init__(
        self,
        scale: float,
        angle: float = 0.0,
        reflect: bool = False,
        tx: float = 0.0,
        ty: float = 0.0,
    ) -> None:
        if scale <= 0.0:
            raise ValueError(f"scale must be positive, got {scale}")
        self.scale = float(scale)
        self.reflect = bool(reflect)
        self.a = scale * cmath.exp(1j * angle)
        self.t = complex(tx, ty)

    @classmethod
    def from_linear(cls, a: complex, t: complex, reflect: bool = False) -> "Similitude":
        """Build directly from the complex linear part and translation."""
        f = cls.__new__(cls)
        f.scale = abs(a)
        if f.scale <= 0.0:
            raise ValueError("linear part must be nonzero")
        f.reflect = bool(reflect)
        f.a = a
        f.t = t
        return f

    @classmethod
    def identity(cls) -> "Similitude":
        return cls.from_linear(1.0 + 0.0j, 0.0j)

    @property
    def angle(self) -> float:
        """Rotation angle of the orthogonal part, normalized to [0, 2*pi)."""
        ang = cmath.phase(self.a) % TWO_PI
        return 0.0 if TWO_PI - ang < 1e-12 else ang

    @property
    def translation(self) -> Point:
        return Point(self.t.real, self.t.imag)

    def __call__(self, z: complex) -> complex:
        if self.reflect:
            return self.a * z.conjugate() + self.t
        return self.a * z + self.t

    def apply(self, p: Point) -> Point:
        return Point.of(self(complex(p.x, p.y)))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"Similitude(scale={self.scale:.12g}, angle={self.angle:.12g}, "
            f"reflect={self.reflect}, t=({self.t.real:.12g}, {self.t.imag:.12g}))"
        )


def compose(f: Similitude, g: Similitude) -> Similitude:
    """Return f o g (apply g first)."""
    if f.reflect:
        a = f.a * g.a.conjugate()
        t = f.a * g.t.conjugate() + f.t
    else:
        a = f.a * g.a
        t = f.a * g.t + f.t
    return Similitude.from_linear(a, t, f.reflect ^ g.reflect)


def compose_all(maps: "list[Similitude] | tuple[Similitude, ...]") -> Similitude:
    """Compose a sequence of maps left to right: maps[0] o maps[1] o ..."""
    out = Similitude.identity()
    for m in maps:
        out = compose(out, m)
    return out


def inverse(f: Similitude) -> Similitude:
    """Return f^-1. Inverses of contractions are expansions; scale may exceed 1."""
    if f.reflect:
        a = (1.0 / f.a).conjugate()
        t = -(f.t / f.a).conjugate()
    else:
        a = 1.0 / f.a
        t = -f.t / f.a
    return Similitude.from_linear(a, t, f.reflect)


def fixed_point(f: Similitude) -> Point:
    """Return the unique p with f(p) = p.

    Raises ScaleOne when the scale is 1 within machine tolerance, since the
    2x2 system (I - rM) p = t is singular there.
    """
    if abs(f.scale - 1.0) <= _SCALE_ONE_TOL:
        raise ScaleOne(f"map has scale {f.scale}; no unique fixed point")
    if f.reflect:
        # p = a*conj(p) + t, solved as a real 2x2 system with det 1 - scale^2.
        al, be = f.a.real, f.a.imag
        det = 1.0 - f.scale * f.scale
        x = ((1.0 + al) * f.t.real + be * f.t.imag) / det
        y = (be * f.t.real + (1.0 - al) * f.t.imag) / det
        return Point(x, y)
    z = f.t / (1.0 - f.a)
    return Point(z.real, z.imag)


def approx_eq(f: Similitude, g: Similitude, eps: float) -> bool:
    """Component-wise closeness: reflection equal, linear parts and
    translations within eps."""
    if f.reflect != g.reflect:
        return False
    return abs(f.a - g.a) <= eps and abs(f.t - g.t) <= eps


def canonical_key(f: Similitude, quantum: float) -> CanonicalKey:
    """Deterministic discrete key from snap-rounding the map to a grid.

    Maps that agree within quantum/4 in every component get equal keys except
    on grid boundaries; callers that merge by key re-check with approx_eq.
    The linear part is rounded as a complex number, which encodes (scale,
    angle) jointly and avoids the angle wrap-around hazard at 0 == 2*pi.
    """
    if quantum <= 0.0:
        raise ValueError("quantum must be positive")
    return (
        int(f.reflect),
        round(f.a.real / quantum),
        round(f.a.imag / quantum),
        round(f.t.real / quantum),
        round(f.t.imag / quantum),
    )
