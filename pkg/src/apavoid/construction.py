"""The progression-free sets ``S(N)`` and the sets derived from them.

``S(N)`` is a union of cells ``S_m`` inside ``[m, m+1)``. For ``m >= 0`` the
cell is ``m + R_i``, where ``R_i = [0,1)`` minus ``Q_i = [i/N, (i+1)/N)`` and
``i = k mod N`` for the block ``beta_k <= m < beta_{k+1}``; here
``beta_k = 1 + (N+1) + ... + (N+1)**(k-1)``. Cells with ``m < 0`` are copies of
``S_{|m|}`` shifted by ``2m``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

from .errors import UnsupportedSpec
from .intervals import IntervalSet
from .reals import (
    Quadratic,
    as_real,
    ceil_div,
    format_exact,
    locate_subinterval,
    parse_exact,
    simplify,
)


# -- set descriptions -------------------------------------------------------


@dataclass(frozen=True)
class Basic:
    N: int

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")


@dataclass(frozen=True)
class ScaledIntersection:
    """``inner ∩ r*inner`` for an irrational quadratic ``r > 1``."""

    inner: "SetSpec"
    r: Quadratic

    def __post_init__(self):
        r = self.r
        if isinstance(r, str):
            r = parse_exact(r)
        r = as_real(r)
        if not isinstance(r, Quadratic) or r.is_rational:
            raise ValueError("r must be an exact quadratic irrational")
        if not r > 1:
            raise ValueError("r must exceed 1")
        object.__setattr__(self, "r", r)
        if dimension(self.inner) != 1:
            raise ValueError("scaled intersection needs a one-dimensional inner set")


@dataclass(frozen=True)
class Product:
    factors: Tuple["SetSpec", ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a product needs at least one factor")
        object.__setattr__(self, "factors", factors)


@dataclass(frozen=True)
class ExplicitComplement:
    """The complement of a bounded finite union ``G``."""

    G: IntervalSet

    def __post_init__(self):
        if not isinstance(self.G, IntervalSet):
            object.__setattr__(self, "G", IntervalSet(self.G))


SetSpec = Union[Basic, ScaledIntersection, Product, ExplicitComplement]


def dimension(spec: SetSpec) -> int:
    if isinstance(spec, Product):
        return sum(dimension(f) for f in spec.factors)
    return 1


def spec_to_json(spec: SetSpec) -> dict:
    if isinstance(spec, Basic):
        return {"type": "basic", "N": spec.N}
    if isinstance(spec, ScaledIntersection):
        return {"type": "scaled", "inner": spec_to_json(spec.inner), "r": format_exact(spec.r)}
    if isinstance(spec, Product):
        return {"type": "product", "factors": [spec_to_json(f) for f in spec.factors]}
    if isinstance(spec, ExplicitComplement):
        return {"type": "complement", "G": spec.G.to_json()}
    raise TypeError(f"not a set spec: {spec!r}")


def spec_from_json(data) -> SetSpec:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("type")
    if kind == "basic":
        return Basic(int(data["N"]))
    if kind == "scaled":
        return ScaledIntersection(spec_from_json(data["inner"]), parse_exact(str(data["r"])))
    if kind == "product":
        return Product(tuple(spec_from_json(f) for f in data["factors"]))
    if kind == "complement":
        return ExplicitComplement(IntervalSet.from_json(data["G"]))
    raise ValueError(f"unknown spec type {kind!r}")


def parse_spec(text: str) -> SetSpec:
    """Parse ``basic:N``, ``basic:N^d`` (d-fold product), ``scaled:N:r`` or JSON."""
    text = text.strip()
    if text.startswith("{"):
        return spec_from_json(text)
    head, _, rest = text.partition(":")
    if head == "basic":
        n, _, power = rest.partition("^")
        base = Basic(int(n))
        return Product((base,) * int(power)) if power else base
    if head == "scaled":
        n, _, r = rest.partition(":")
        return ScaledIntersection(Basic(int(n)), parse_exact(r))
    raise ValueError(f"cannot parse set spec {text!r}")


# -- blocks and cells -------------------------------------------------------


@dataclass(frozen=True)
class BlockIndex:
    k: int
    beta_k: int
    beta_k1: int
    residue: int


def beta(N: int, k: int) -> int:
    """``sum_{j<k} (N+1)**j``."""
    if N < 1 or k < 0:
        raise ValueError("need N >= 1 and k >= 0")
    return ((N + 1) ** k - 1) // N


def block_index(N: int, m: int) -> BlockIndex:
    """Block ``k`` with ``beta_k <= m < beta_{k+1}``; ``m = 0`` is block 0."""
    if m < 0:
        raise ValueError("block index needs m >= 0")
    k, b, nxt = 0, 0, 1
    while nxt <= m:
        k, b, nxt = k + 1, nxt, (N + 1) * nxt + 1
    return BlockIndex(k, b, nxt, k % N)


def cell_residue(N: int, m: int) -> int:
    """Index ``i`` of the deleted ``Q_i`` in cell ``m`` (any integer ``m``)."""
    return block_index(N, abs(m)).residue


def base_cell(N: int, i: int) -> IntervalSet:
    """``R_i = [0, 1)`` minus ``[i/N, (i+1)/N)``."""
    if not 0 <= i < N:
        raise ValueError(f"residue {i} outside 0..{N - 1}")
    return IntervalSet([(0, Fraction(i, N)), (Fraction(i + 1, N), 1)])


@lru_cache(maxsize=4096)
def cell(N: int, m: int) -> IntervalSet:
    """``S ∩ [m, m+1)``."""
    if m >= 0:
        return base_cell(N, block_index(N, m).residue).translate(m)
    return cell(N, -m).translate(2 * m)


def forbidden_interval(N: int, m: int) -> IntervalSet:
    """The deleted piece ``m + Q_i`` of cell ``m``."""
    i = cell_residue(N, m)
    return IntervalSet.interval(m + Fraction(i, N), m + Fraction(i + 1, N))


# -- windows and membership -------------------------------------------------


def window(spec: SetSpec, a, b) -> IntervalSet:
    """``spec ∩ [a, b)`` for one-dimensional specs."""
    a, b = simplify(as_real(a)), simplify(as_real(b))
    if not a < b:
        raise ValueError("window needs a < b")
    if isinstance(spec, Basic):
        first, last = math.floor(as_real(a)), math.ceil(as_real(b))
        pieces = []
        for m in range(first, last):
            pieces.extend(cell(spec.N, m))
        return IntervalSet(pieces).clip(a, b)
    if isinstance(spec, ExplicitComplement):
        return IntervalSet.interval(a, b).subtract(spec.G)
    if isinstance(spec, ScaledIntersection):
        r = spec.r
        own = window(spec.inner, a, b)
        scaled = window(spec.inner, a / r, b / r).scale(r)
        return own.intersect(scaled)
    raise UnsupportedSpec(f"window is defined for one-dimensional specs, not {type(spec).__name__}")


def _contains_1d(spec: SetSpec, x) -> bool:
    if isinstance(spec, Basic):
        m = x.floor()
        return locate_subinterval(x, spec.N) != cell_residue(spec.N, m)
    if isinstance(spec, ScaledIntersection):
        return _contains_1d(spec.inner, x) and _contains_1d(spec.inner, x / spec.r)
    if isinstance(spec, ExplicitComplement):
        return not spec.G.contains_point(x)
    raise UnsupportedSpec(f"{type(spec).__name__} is not one-dimensional")


def contains(spec: SetSpec, x) -> bool:
    """Membership of a point (scalar, or a sequence for products)."""
    if isinstance(spec, Product):
        coords = list(x) if isinstance(x, (list, tuple)) else [x]
        if len(coords) != dimension(spec):
            raise ValueError(f"point has {len(coords)} coordinates, spec has {dimension(spec)}")
        pos = 0
        for f in spec.factors:
            d = dimension(f)
            part = coords[pos] if d == 1 and not isinstance(f, Product) else coords[pos:pos + d]
            if not contains(f, part):
                return False
            pos += d
        return True
    if isinstance(x, (list, tuple)):
        if len(x) != 1:
            raise ValueError("one-dimensional spec needs a scalar point")
        x = x[0]
    return _contains_1d(spec, as_real(x))


# -- reductions -------------------------------------------------------------


def choose_N_for_lambda(lam) -> int:
    """Smallest ``N`` with ``2/N <= 1 - lam``."""
    lam = Fraction(lam)
    if not 0 <= lam < 1:
        raise ValueError("lambda must lie in [0, 1)")
    return ceil_div(2, 1 - lam)


def choose_mu_for_lambda(lam, r) -> Fraction:
    """A rational ``mu`` with ``(lam + r)/(1 + r) <= mu < 1``."""
    lam = Fraction(lam)
    if not 0 <= lam < 1:
        raise ValueError("lambda must lie in [0, 1)")
    r = as_real(r)
    if not r > 1:
        raise ValueError("r must exceed 1")
    low = (lam + r) / (1 + r)
    # shrink the enclosure until its top stays clear of 1
    width = Fraction(1, 2)
    while True:
        _, hi_enc = low.enclosure(width)
        if hi_enc < 1:
            break
        width /= 16
    mu = (hi_enc + 1) / 2
    assert low <= mu < 1
    return mu


def lambda_reduction(lam, r) -> ScaledIntersection:
    """``T = S ∩ rS`` meeting every unit interval in measure >= lam."""
    mu = choose_mu_for_lambda(lam, r)
    return ScaledIntersection(Basic(choose_N_for_lambda(mu)), as_real(r))


def _root_upper(lam: Fraction, n: int) -> Fraction:
    # rational nu in [lam**(1/n), 1) by bisection
    lo, hi = Fraction(0), Fraction(1)
    if lam == 0:
        return Fraction(0)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid**n >= lam:
            hi = mid
        else:
            lo = mid
        if hi < 1 and hi**n >= lam and hi - lo < (1 - hi) / 4:
            break
    return hi


def product_for_lambda(lam, n: int) -> Product:
    """``n``-fold product meeting every unit axis-parallel cube in measure >= lam."""
    lam = Fraction(lam)
    if not 0 < lam < 1 or n < 1:
        raise ValueError("need 0 < lam < 1 and n >= 1")
    nu = _root_upper(lam, n)
    return Product((Basic(choose_N_for_lambda(nu)),) * n)
