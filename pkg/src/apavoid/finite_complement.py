"""Two-sided progressions inside sets whose complement ``G`` has small measure.

With ``|G| < xi`` and ``I_k = (2k*xi, 2(k+1)*xi)``, every point ``x`` of

    I = I_0 minus the union over k of (G ∩ I_k) - 2k*xi

has ``x + 2k*xi`` outside ``G`` for every integer ``k``, and ``|I| >= 2xi - |G|``.
Only the finitely many ``k`` whose ``I_k`` meets the bounded set ``G`` matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .errors import MeasureTooLarge
from .intervals import IntervalSet
from .reals import format_exact


@dataclass(frozen=True)
class ApWitness:
    """Progression ``x + gap*Z`` avoiding ``G``.

    ``residual_set`` is the computed ``I`` in half-open form; the true ``I`` is
    a subset of the open interval ``(0, gap)``, so the points listed in
    ``excluded_points`` (the left end 0, when present) are not part of it.
    """

    x: Fraction
    gap: Fraction
    xi: Fraction
    residual_set: IntervalSet
    measure_lower_bound: Fraction
    excluded_points: Tuple[Fraction, ...] = ()

    def to_json(self) -> dict:
        return {
            "x": format_exact(self.x),
            "gap": format_exact(self.gap),
            "xi": format_exact(self.xi),
            "residual_set": self.residual_set.to_json(),
            "residual_measure": format_exact(self.residual_set.measure()),
            "measure_lower_bound": format_exact(self.measure_lower_bound),
            "excluded_points": [format_exact(p) for p in self.excluded_points],
        }

    @classmethod
    def from_json(cls, data) -> "ApWitness":
        return cls(
            x=Fraction(data["x"]),
            gap=Fraction(data["gap"]),
            xi=Fraction(data["xi"]),
            residual_set=IntervalSet.from_json(data["residual_set"]),
            measure_lower_bound=Fraction(data["measure_lower_bound"]),
            excluded_points=tuple(Fraction(p) for p in data.get("excluded_points", ())),
        )


def pulled_back_pieces(G: IntervalSet, xi) -> IntervalSet:
    """Union over ``k`` of ``(G ∩ [2k*xi, 2(k+1)*xi)) - 2k*xi``, inside ``[0, 2xi)``."""
    period = 2 * Fraction(xi)
    pieces = []
    for lo, hi in G:
        for k in range(math.floor(lo / period), math.ceil(hi / period)):
            base = k * period
            part = IntervalSet.interval(max(lo, base), min(hi, base + period))
            pieces.extend(part.translate(-base))
    return IntervalSet(pieces)


def find_two_sided_ap(G: IntervalSet, xi) -> ApWitness:
    xi = Fraction(xi)
    if xi <= 0:
        raise ValueError("xi must be positive")
    size = G.measure()
    if size >= xi:
        raise MeasureTooLarge(f"|G| = {size} is not below xi = {xi}")
    gap = 2 * xi
    residual = IntervalSet.interval(0, gap).subtract(pulled_back_pieces(G, xi))
    bound = gap - size
    assert residual.measure() >= bound > xi
    lo, hi = residual.intervals[0]
    excluded = (Fraction(0),) if lo == 0 else ()
    return ApWitness(
        x=(lo + hi) / 2,
        gap=gap,
        xi=xi,
        residual_set=residual,
        measure_lower_bound=bound,
        excluded_points=excluded,
    )


def verify_ap_avoids(G: IntervalSet, witness: ApWitness, k_range: int) -> bool:
    """``x + gap*k`` is outside ``G`` for every ``|k| <= k_range``."""
    if k_range < 0:
        raise ValueError("range must be >= 0")
    x, gap = witness.x, witness.gap
    return not any(G.contains_point(x + k * gap) for k in range(-k_range, k_range + 1))
