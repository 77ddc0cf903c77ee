"""Words, eventually periodic codings, shift dynamics and the coding map.

An eventually periodic coding pre*(w)^inf is held in canonical form:

  * the period is primitive (not a power of a shorter word), and
  * trailing preperiod letters equal to the last period letter are absorbed
    into a rotation of the period, so "3(322113)" normalizes to "(332211)".

Canonical form makes two codings equal as infinite sequences exactly when
they are structurally equal, so sets and orbits work by value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import NotStable, ValidationError
from .geometry import Point, fixed_point
from .ifs import IFS, Word

_CODING_RE = re.compile(r"^(\d*)\((\d+)\)$")


def _primitive_root(word: Word) -> Word:
    """Shortest u with word == u repeated."""
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word


@dataclass(frozen=True)
class EPCoding:
    """An eventually periodic symbol sequence preperiod*(period)^inf."""

    preperiod: Word
    period: Word

    def __post_init__(self) -> None:
        pre = tuple(self.preperiod)
        per = _primitive_root(tuple(self.period))
        if not per:
            raise ValidationError("period: must be nonempty")
        for letter in pre + per:
            if letter < 1:
                raise ValidationError(f"letters must be >= 1, got {letter}")
        # Absorb the preperiod tail: pre'.a (v.a)^inf == pre' (a.v)^inf.
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = (per[-1],) + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @property
    def first(self) -> int:
        return self.preperiod[0] if self.preperiod else self.period[0]

    def shift(self) -> "EPCoding":
        """Drop the first symbol (rotate the period when the preperiod is empty)."""
        if self.preperiod:
            return EPCoding(self.preperiod[1:], self.period)
        return EPCoding((), self.period[1:] + self.period[:1])

    def prepend(self, k: int) -> "EPCoding":
        return EPCoding((k,) + self.preperiod, self.period)

    def orbit(self) -> set["EPCoding"]:
        """All shift iterates {shift^k, k >= 0}; at most |pre| + |period| many."""
        seen: set[EPCoding] = set()
        cur = self
        while cur not in seen:
            seen.add(cur)
            cur = cur.shift()
        return seen

    def prefix(self, n: int) -> Word:
        """First n letters of the infinite sequence."""
        out = list(self.preperiod[:n])
        while len(out) < n:
            out.extend(self.period[: n - len(out)])
        return tuple(out)

    def __str__(self) -> str:
        pre = "".join(str(k) for k in self.preperiod)
        per = "".join(str(k) for k in self.period)
        return f"{pre}({per})"

    @classmethod
    def parse(cls, text: str) -> "EPCoding":
        """Inverse of str(): "1(2)" is 1 followed by repeating 2.

        Single-digit letters only, which covers alphabets up to size 9.
        """
        m = _CODING_RE.match(text.strip())
        if m is None:
            raise ValidationError(f"coding: cannot parse {text!r}")
        pre = tuple(int(ch) for ch in m.group(1))
        per = tuple(int(ch) for ch in m.group(2))
        return cls(pre, per)


def _check_alphabet(ifs: IFS, coding: EPCoding) -> None:
    for letter in coding.preperiod + coding.period:
        if letter > ifs.n:
            raise ValidationError(f"coding letter {letter} out of range 1..{ifs.n}")


def pi_eval(ifs: IFS, coding: EPCoding) -> Point:
    """Value of the coding map: S_pre applied to the fixed point of S_period."""
    _check_alphabet(ifs, coding)
    p = fixed_point(ifs.word_map(coding.period))
    return ifs.word_map(coding.preperiod).apply(p)


def ep_coding_of_point(
    ifs: IFS, stable_set: list[Point], x: Point, eps: float = 1e-9
) -> EPCoding:
    """Constructive eventually periodic coding of a point of a stable set.

    Follows the preimage chain x_k = S_{i_{k+1}}(x_{k+1}) inside stable_set,
    breaking ties by smallest letter then smallest point index, until the
    chain revisits a point. Raises NotStable when x is not in the set or some
    chain element has no preimage within eps.
    """
    pts = [p.as_complex() for p in stable_set]
    cur = next((k for k, p in enumerate(pts) if abs(p - x.as_complex()) <= eps), None)
    if cur is None:
        raise NotStable(f"point {x} is not in the given set at eps={eps}")

    letters: list[int] = []
    seen_at = {cur: 0}
    while True:
        step = None
        for j, m in enumerate(ifs.maps, start=1):
            for idx, p in enumerate(pts):
                if abs(m(p) - pts[cur]) <= eps:
                    step = (j, idx)
                    break
            if step is not None:
                break
        if step is None:
            raise NotStable(
                f"no preimage for chain element {Point.of(pts[cur])} at eps={eps}"
            )
        letters.append(step[0])
        cur = step[1]
        if cur in seen_at:
            split = seen_at[cur]
            return EPCoding(tuple(letters[:split]), tuple(letters[split:]))
        seen_at[cur] = len(letters)
