"""Finite unions of half-open intervals ``[lo, hi)``.

Endpoints are normally ``Fraction``. Exact certified reals (quadratic
irrationals) are also accepted so that scaled sets such as ``r*S`` can be
represented; every comparison stays exact for those.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Iterator, List, Sequence, Tuple

from .reals import as_real, format_exact, parse_exact, simplify

Interval = Tuple[object, object]


def _endpoint(v):
    if isinstance(v, str):
        v = parse_exact(v)
    if isinstance(v, float):
        raise TypeError("float endpoints are not exact")
    return simplify(as_real(v))


class IntervalSet:
    """Normalized union of half-open intervals.

    Intervals are sorted, nonempty, and separated by gaps: ``hi_i < lo_{i+1}``.
    Instances are immutable.

    >>> IntervalSet([(0, 1), (1, 2)])
    IntervalSet([(0, 2)])
    """

    __slots__ = ("_ivs",)

    def __init__(self, intervals: Iterable[Sequence] = ()):
        pairs = []
        for lo, hi in intervals:
            lo, hi = _endpoint(lo), _endpoint(hi)
            if lo < hi:
                pairs.append((lo, hi))
        pairs.sort(key=lambda p: p[0])
        merged: List[Interval] = []
        for lo, hi in pairs:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self._ivs = tuple(merged)

    @classmethod
    def _from_normalized(cls, ivs) -> "IntervalSet":
        obj = object.__new__(cls)
        obj._ivs = tuple(ivs)
        return obj

    @classmethod
    def interval(cls, lo, hi) -> "IntervalSet":
        return cls([(lo, hi)])

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        return self._ivs

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._ivs)

    def __len__(self):
        return len(self._ivs)

    def __bool__(self):
        return bool(self._ivs)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._ivs == other._ivs

    def __hash__(self):
        return hash(self._ivs)

    def __repr__(self):
        body = ", ".join(f"({format_exact(lo)}, {format_exact(hi)})" for lo, hi in self._ivs)
        return f"IntervalSet([{body}])"

    @property
    def lo(self):
        return self._ivs[0][0] if self._ivs else None

    @property
    def hi(self):
        return self._ivs[-1][1] if self._ivs else None

    # -- set algebra ----------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._ivs + other._ivs)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        a, b = self._ivs, other._ivs
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet._from_normalized(out)

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        b = other._ivs
        j = 0
        for lo, hi in self._ivs:
            while j < len(b) and b[j][1] <= lo:
                j += 1
            cur = lo
            k = j
            while k < len(b) and b[k][0] < hi:
                if b[k][0] > cur:
                    out.append((cur, b[k][0]))
                if b[k][1] > cur:
                    cur = b[k][1]
                k += 1
            if cur < hi:
                out.append((cur, hi))
        return IntervalSet._from_normalized(out)

    __or__ = union
    __and__ = intersect
    __sub__ = subtract

    def measure(self):
        total = Fraction(0)
        for lo, hi in self._ivs:
            total = total + (hi - lo)
        return simplify(total)

    def contains_point(self, x) -> bool:
        """Half-open membership; exact for rational and quadratic points."""
        if not isinstance(x, Fraction):
            x = simplify(as_real(x))
        i = bisect_right(self._ivs, x, key=lambda iv: iv[0])
        return i > 0 and x < self._ivs[i - 1][1]

    __contains__ = contains_point

    def translate(self, t) -> "IntervalSet":
        t = simplify(as_real(t))
        return IntervalSet._from_normalized(
            (simplify(lo + t), simplify(hi + t)) for lo, hi in self._ivs
        )

    def scale(self, r) -> "IntervalSet":
        """Image under ``x -> r*x`` for ``r > 0``."""
        r = simplify(as_real(r))
        if not r > 0:
            raise ValueError("scale factor must be positive")
        return IntervalSet._from_normalized(
            (simplify(lo * r), simplify(hi * r)) for lo, hi in self._ivs
        )

    def clip(self, a, b) -> "IntervalSet":
        return self.intersect(IntervalSet.interval(a, b))

    # -- serialization --------------------------------------------------

    def to_json(self) -> list:
        return [[format_exact(lo), format_exact(hi)] for lo, hi in self._ivs]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        return cls((lo, hi) for lo, hi in data)


EMPTY = IntervalSet()


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.intersect(b)


def subtract(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.subtract(b)


def measure(a: IntervalSet):
    return a.measure()


def contains_point(a: IntervalSet, x) -> bool:
    return a.contains_point(x)
