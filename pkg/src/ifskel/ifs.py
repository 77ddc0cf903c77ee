"""IFS model: validation, derived bounds, iteration, sampling, shared linear part.

Map order is significant everywhere (coding letters are 1-based indices into
it), so an IFS never reorders its maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, ValidationError
from .geometry import Point, Similitude, compose, fixed_point

# Contractions must stay clear of scale 1 for fixed points and bound formulas.
MAX_CONTRACTION = 1.0 - 1e-9

DEFAULT_ITERATE_CAP = 10_000
DEFAULT_SAMPLE_CAP = 400_000

Word = tuple[int, ...]


class IFS:
    """An ordered list of at least two contracting similitudes."""

    __slots__ = ("maps", "name", "r_min", "r_max")

    def __init__(self, maps: Sequence[Similitude], name: str = "ifs") -> None:
        maps = tuple(maps)
        if len(maps) < 2:
            raise ValidationError(f"maps: need at least 2 maps, got {len(maps)}")
        for idx, m in enumerate(maps):
            if not (0.0 < m.scale <= MAX_CONTRACTION):
                raise ValidationError(
                    f"maps[{idx}].scale: {m.scale!r} is not a certified "
                    f"contraction (need 0 < scale <= {MAX_CONTRACTION})"
                )
        self.maps = maps
        self.name = name
        self.r_min = min(m.scale for m in maps)
        self.r_max = max(m.scale for m in maps)

    @property
    def n(self) -> int:
        return len(self.maps)

    def map_of(self, letter: int) -> Similitude:
        """The map for a 1-based coding letter."""
        return self.maps[letter - 1]

    def word_map(self, word: Iterable[int]) -> Similitude:
        """S_word = S_{w1} o S_{w2} o ... for 1-based letters."""
        out = Similitude.identity()
        for letter in word:
            out = compose(out, self.maps[letter - 1])
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"IFS({self.name!r}, n={self.n})"


@dataclass(frozen=True)
class BoundingBall:
    """A ball B with S_j(B) inside B for every map, hence containing the attractor."""

    center: Point
    radius: float

    @property
    def center_c(self) -> complex:
        return complex(self.center.x, self.center.y)


def bounding_ball(ifs: IFS) -> BoundingBall:
    """Invariant ball centered at the fixed point of the first map.

    radius = max_j |S_j(c) - c| / (1 - r_max) makes |S_j(c) - c| + r_j R <= R
    hold for every j, so the ball is mapped into itself.
    """
    center = fixed_point(ifs.maps[0])
    c = center.as_complex()
    spread = max(abs(m(c) - c) for m in ifs.maps)
    radius = spread / (1.0 - ifs.r_max)
    if radius <= 0.0:
        # All maps share the fixed point: the attractor is the singleton {c}.
        radius = 1e-9 * (1.0 + abs(c))
    return BoundingBall(center, radius)


def iterate_ifs(ifs: IFS, n: int, cap: int = DEFAULT_ITERATE_CAP) -> IFS:
    """The IFS of all n-fold compositions, in lexicographic word order."""
    if n < 1:
        raise ValidationError(f"n: must be >= 1, got {n}")
    if ifs.n**n > cap:
        raise CapExceeded(f"iterate would create {ifs.n ** n} maps, cap is {cap}")
    if n == 1:
        return ifs
    letters = range(1, ifs.n + 1)
    maps = [ifs.word_map(word) for word in itertools.product(letters, repeat=n)]
    return IFS(maps, name=f"{ifs.name}^{n}")


def sample_attractor_array(ifs: IFS, depth: int, cap: int = DEFAULT_SAMPLE_CAP) -> np.ndarray:
    """Depth-d cylinder samples S_I(c) as a complex array, lexicographic in I.

    Every sample is within r_max**depth * radius of the attractor.
    """
    if depth < 0:
        raise ValidationError(f"depth: must be >= 0, got {depth}")
    if ifs.n**depth > cap:
        raise CapExceeded(f"sampling would create {ifs.n ** depth} points, cap is {cap}")
    ball = bounding_ball(ifs)
    pts = np.array([ball.center_c], dtype=np.complex128)
    for _ in range(depth):
        layers = []
        for m in ifs.maps:
            base = np.conj(pts) if m.reflect else pts
            layers.append(m.a * base + m.t)
        pts = np.concatenate(layers)
    return pts


def sample_attractor(ifs: IFS, depth: int, cap: int = DEFAULT_SAMPLE_CAP) -> list[Point]:
    return [Point(z.real, z.imag) for z in sample_attractor_array(ifs, depth, cap)]


@dataclass(frozen=True)
class SingleMatrixForm:
    """Shared linear part rM and digits d_i with S_i(z) = rM(z + d_i)."""

    linear: Similitude
    digits: tuple[Point, ...]


def is_uniform_ratio(ifs: IFS, eps: float = 1e-9) -> bool:
    """Whether all contraction ratios agree within eps."""
    return ifs.r_max - ifs.r_min <= eps


def detect_single_matrix(ifs: IFS, eps: float = 1e-9) -> SingleMatrixForm | None:
    """Detect a single shared linear part, if any.

    Returns None when the maps do not share one linear part within eps. The
    digits satisfy S_i(z) = rM(z + d_i) exactly up to eps by construction.
    """
    first = ifs.maps[0]
    for m in ifs.maps[1:]:
        if m.reflect != first.reflect or abs(m.a - first.a) > eps:
            return None
    digits = []
    for m in ifs.maps:
        d = m.t / first.a
        if first.reflect:
            d = d.conjugate()
        digits.append(Point(d.real, d.imag))
    linear = Similitude.from_linear(first.a, 0.0j, first.reflect)
    return SingleMatrixForm(linear, tuple(digits))
