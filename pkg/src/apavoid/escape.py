"""Escape certificates: an index at which a progression leaves the set.

Rational gaps are handled constructively. Every term of ``x + p*N`` has the
same fractional part, in some ``Q_j``; a block of residue ``j`` longer than
``p`` lying past ``x`` must catch a term, and no term there is in ``S``.
Irrational gaps have no computable escape bound, so they are searched up to
a caller-given depth and the result is either a certificate or an explicit
give-up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .construction import (
    Basic,
    Product,
    SetSpec,
    beta,
    block_index,
    cell_residue,
    contains,
    dimension,
    forbidden_interval,
)
from .errors import NotInSet, PreconditionUnmet, ZeroGap
from .intervals import IntervalSet
from .reals import (
    CertifiedReal,
    LinearTerms,
    as_real,
    ceil_div,
    format_exact,
    locate_subinterval,
    parse_exact,
    simplify,
)

CONSTRUCTIVE = "ConstructiveRational"
SEARCH = "BoundedSearch"
DEFAULT_DEPTH = 10**6


def _coords(v) -> Tuple[CertifiedReal, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(as_real(c) for c in v)
    return (as_real(v),)


@dataclass(frozen=True)
class Progression:
    """``x0 + n*delta`` for ``n = 0, 1, 2, ...``; vectors as tuples."""

    x0: object
    delta: object

    def __post_init__(self):
        x0, delta = _coords(self.x0), _coords(self.delta)
        if len(x0) != len(delta):
            raise ValueError("x0 and delta differ in dimension")
        if all(d.sign() == 0 for d in delta):
            raise ZeroGap("gap must be nonzero")
        scalar = not isinstance(self.x0, (list, tuple))
        object.__setattr__(self, "x0", x0[0] if scalar else x0)
        object.__setattr__(self, "delta", delta[0] if scalar else delta)

    @property
    def dimension(self) -> int:
        return len(self.x0) if isinstance(self.x0, tuple) else 1

    def term(self, n: int):
        if isinstance(self.x0, tuple):
            return tuple(simplify(a + n * d) for a, d in zip(self.x0, self.delta))
        return simplify(self.x0 + n * self.delta)

    def coordinate(self, i: int) -> "Progression":
        if not isinstance(self.x0, tuple):
            if i != 0:
                raise IndexError(i)
            return self
        return Progression(self.x0[i], self.delta[i])


def _fmt(v):
    if isinstance(v, tuple):
        return [format_exact(simplify(c)) for c in v]
    return format_exact(simplify(v))


@dataclass(frozen=True)
class EscapeCertificate:
    """A term ``x_n`` outside the set, with the block data explaining why.

    ``m, k, j, forbidden`` describe the cell of ``x_n`` (of the projected
    coordinate for products) when the failing factor is a basic set.
    ``bound_k`` is the block satisfying the constructive conditions; the
    reported escape happens at or before it.
    """

    n: int
    x_n: object
    m: Optional[int]
    k: Optional[int]
    j: Optional[int]
    forbidden: Optional[IntervalSet]
    method: str
    bound_k: Optional[int] = None
    step: Optional[int] = None
    coordinate: Optional[int] = None

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "x_n": _fmt(self.x_n),
            "m": self.m,
            "k": self.k,
            "j": self.j,
            "forbidden": self.forbidden.to_json() if self.forbidden is not None else None,
            "method": self.method,
        }
        if self.bound_k is not None:
            out["bound_k"] = self.bound_k
            out["step"] = self.step
        if self.coordinate is not None:
            out["coordinate"] = self.coordinate
        return out

    @classmethod
    def from_json(cls, data) -> "EscapeCertificate":
        x_n = data["x_n"]
        x_n = tuple(parse_exact(c) for c in x_n) if isinstance(x_n, list) else parse_exact(x_n)
        forbidden = data.get("forbidden")
        return cls(
            n=data["n"],
            x_n=x_n,
            m=data.get("m"),
            k=data.get("k"),
            j=data.get("j"),
            forbidden=IntervalSet.from_json(forbidden) if forbidden is not None else None,
            method=data["method"],
            bound_k=data.get("bound_k"),
            step=data.get("step"),
            coordinate=data.get("coordinate"),
        )


@dataclass(frozen=True)
class NoWitnessWithinDepth:
    """The search gave up; nothing is claimed about containment."""

    depth: int

    def to_json(self) -> dict:
        return {"result": "NoWitnessWithinDepth", "depth": self.depth}


def _basic_cert(N: int, n: int, x_n, m: int, method: str, **extra) -> EscapeCertificate:
    b = block_index(N, abs(m))
    return EscapeCertificate(
        n=n,
        x_n=x_n,
        m=m,
        k=b.k,
        j=b.residue,
        forbidden=forbidden_interval(N, m),
        method=method,
        **extra,
    )


# -- rational gaps ---------------------------------------------------------


def constructive_block(N: int, start: int, step: int, j: int) -> int:
    """Smallest ``k`` with ``beta_k > start``, ``(N+1)**k > step`` and ``k = j mod N``."""
    k = j
    while beta(N, k) <= start or (N + 1) ** k <= step:
        k += N
    return k


def _first_hit(N: int, c0: int, p: int, j: int, k_max: int) -> int:
    """Least ``s >= 0`` with ``c0 + p*s`` in a block of residue ``j``, scanning
    blocks up to ``k_max`` (which is known to catch the sequence)."""
    k = block_index(N, c0).k
    while k <= k_max:
        if k % N == j:
            lo = max(beta(N, k), c0)
            s = ceil_div(lo - c0, p)
            if c0 + p * s < beta(N, k + 1):
                return s
        k += 1
    raise AssertionError("constructive block did not catch the progression")


def certify_escape_rational(N: int, x, delta) -> EscapeCertificate:
    """Certificate for ``x + delta*N`` leaving ``S(N)``, for rational ``x, delta``.

    The progression is thinned to ``x + p*N`` (``delta = p/q``), whose terms
    share one fractional part. The returned index is the first escape of the
    thinned progression, so all earlier thinned terms lie in the set.
    """
    x, delta = Fraction(x), Fraction(delta)
    if delta == 0:
        raise ZeroGap("gap must be nonzero")
    if not contains(Basic(N), x):
        raise NotInSet(f"{x} is not in S({N})")
    sgn = 1 if delta > 0 else -1
    p, q = abs(delta).numerator, delta.denominator
    j = locate_subinterval(x, N)
    m0 = x.numerator // x.denominator

    # Before crossing 0 the reflected cell index |m| shrinks; check those
    # terms one by one. Afterwards it grows by p per term.
    if sgn > 0:
        t_far = -(m0 // p) if m0 < 0 else 0
    else:
        t_far = m0 // p + 1 if m0 >= 0 else 0
    c0 = abs(m0 + sgn * p * t_far)
    bound = constructive_block(N, c0, p, j)
    t = next((t for t in range(t_far) if cell_residue(N, m0 + sgn * p * t) == j), None)
    if t is None:
        t = t_far + _first_hit(N, c0, p, j, bound)

    n = q * t
    x_n = x + n * delta
    m = x_n.numerator // x_n.denominator
    return _basic_cert(N, n, x_n, m, CONSTRUCTIVE, bound_k=bound, step=sgn * p)


# -- bounded search --------------------------------------------------------


def _flat_factors(spec: SetSpec) -> List[SetSpec]:
    if isinstance(spec, Product):
        out = []
        for f in spec.factors:
            out.extend(_flat_factors(f))
        return out
    return [spec]


def _search_1d(spec: SetSpec, prog: Progression, depth: int) -> Optional[Tuple[int, object, int]]:
    x0, delta = prog.x0, prog.delta
    if isinstance(spec, Basic):
        try:
            terms = LinearTerms(x0, delta)
        except TypeError:
            terms = None
        if terms is not None:
            N = spec.N
            for n in range(depth + 1):
                m, i = terms.cell_and_index(n, N)
                if i == cell_residue(N, m):
                    return n, prog.term(n), m
            return None
    for n in range(depth + 1):
        x = x0 + n * delta
        if not contains(spec, x):
            return n, simplify(x), x.floor() if isinstance(x, CertifiedReal) else None
    return None


def certify_escape_search(spec: SetSpec, prog: Progression, depth: int = DEFAULT_DEPTH):
    """Least ``n <= depth`` with ``x_n`` outside ``spec``, or :class:`NoWitnessWithinDepth`.

    Products are projected onto the first coordinate with a nonzero gap and
    searched there.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if prog.dimension != dimension(spec):
        raise ValueError("progression and set differ in dimension")
    coordinate = None
    target, line = spec, prog
    if isinstance(spec, Product):
        factors = _flat_factors(spec)
        coordinate = next(i for i, d in enumerate(prog.delta) if d.sign() != 0)
        target, line = factors[coordinate], prog.coordinate(coordinate)
    hit = _search_1d(target, line, depth)
    if hit is None:
        return NoWitnessWithinDepth(depth)
    n, x_n, m = hit
    if coordinate is not None:
        x_n = prog.term(n)
    if isinstance(target, Basic):
        cert = _basic_cert(target.N, n, x_n, m, SEARCH)
        if coordinate is not None:
            cert = EscapeCertificate(**{**cert.__dict__, "coordinate": coordinate})
        return cert
    return EscapeCertificate(n, x_n, m, None, None, None, SEARCH, coordinate=coordinate)


def check_certificate(spec: SetSpec, prog: Progression, cert: EscapeCertificate) -> bool:
    """Independent re-check: ``x_n`` recomputed from scratch lies outside ``spec``."""
    x_n = prog.term(cert.n)
    if x_n != cert.x_n:
        return False
    if contains(spec, x_n):
        return False
    if cert.method == CONSTRUCTIVE:
        N = spec.N
        k = cert.bound_k
        x = prog.x0 if prog.delta > 0 else -prog.x0
        j = locate_subinterval(prog.x0, N)
        if not (beta(N, k) > x and (N + 1) ** k > abs(cert.step) and k % N == j):
            return False
        if cert.j != j or locate_subinterval(x_n, N) != j:
            return False
    return True


# -- counting and window-fraction bounds ------------------------------------


def count_in_half_open(x0, delta, a) -> int:
    """Number of terms of ``x0 + delta*N`` in ``[0, a)``, for ``x0 >= 0, delta > 0``."""
    x0, delta, a = Fraction(x0), Fraction(delta), Fraction(a)
    if x0 < 0 or delta <= 0:
        raise ValueError("need x0 >= 0 and delta > 0")
    if a <= x0:
        return 0
    return ceil_div(a - x0, delta)


@dataclass(frozen=True)
class Claim1Report:
    N: int
    x0: Fraction
    delta: Fraction
    k: int
    beta_k: int
    terms_below: int
    terms_in_window: int
    fraction: Optional[Fraction]
    threshold: Fraction
    lower_bound_holds: bool
    ratio_bound: Fraction
    ratio_factor_exceeds_one: bool
    hypotheses: Dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        f = lambda v: None if v is None else format_exact(v)
        return {
            "N": self.N,
            "x0": f(self.x0),
            "delta": f(self.delta),
            "k": self.k,
            "beta_k": str(self.beta_k),
            "terms_below": self.terms_below,
            "terms_in_window": self.terms_in_window,
            "fraction": f(self.fraction),
            "threshold": f(self.threshold),
            "lower_bound_holds": self.lower_bound_holds,
            "ratio_bound": f(self.ratio_bound),
            "ratio_factor_exceeds_one": self.ratio_factor_exceeds_one,
            "hypotheses": self.hypotheses,
        }


def claim1_verify(N: int, x0, delta, k: int) -> Claim1Report:
    """Fraction of the terms below ``beta_k`` lying in ``[beta_k/(N+1), beta_k)``.

    Raises :class:`PreconditionUnmet` (with the report attached) when
    ``x0 > (2N+1)/N * delta``, ``N/(N+1) * beta_k > delta`` or
    ``beta_k > x0`` fails.
    """
    x0, delta = Fraction(x0), Fraction(delta)
    b = beta(N, k)
    cut = Fraction(b, N + 1)
    below = count_in_half_open(x0, delta, b)
    inside = below - count_in_half_open(x0, delta, cut)
    fraction = Fraction(inside, below) if below else None
    threshold = Fraction(N, N + 1)
    hyps = {
        "x0 > (2N+1)/N*delta": x0 > Fraction(2 * N + 1, N) * delta,
        "N/(N+1)*beta_k > delta": threshold * b > delta,
        "beta_k > x0": b > x0,
    }
    factor_den = b - x0 + delta
    factor = (b - Fraction(N + 1, N) * delta) / factor_den if factor_den else None
    report = Claim1Report(
        N=N,
        x0=x0,
        delta=delta,
        k=k,
        beta_k=b,
        terms_below=below,
        terms_in_window=inside,
        fraction=fraction,
        threshold=threshold,
        lower_bound_holds=fraction is not None and fraction > threshold,
        ratio_bound=threshold * factor if factor is not None else None,
        ratio_factor_exceeds_one=factor is not None and factor > 1,
        hypotheses=hyps,
    )
    failed = [name for name, ok in hyps.items() if not ok]
    if failed:
        raise PreconditionUnmet(failed, report)
    return report


# -- equidistribution tallies ----------------------------------------------


@dataclass(frozen=True)
class EquidistDiagnostics:
    """Tallies of ``frac(x_n)`` over ``Q_0..Q_{N-1}`` for ``n = 0..M``.

    ``L`` is the last index ``n <= M`` at which the running ``Q_0`` frequency
    was at least ``epsilon`` away from ``1/N`` (``-1`` if never), or ``None``
    when the deviation at ``M`` itself is not below ``epsilon``.
    """

    N: int
    M: int
    counts: Tuple[int, ...]
    epsilon: Fraction
    L: Optional[int]

    @property
    def frequencies(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(c, self.M + 1) for c in self.counts)

    @property
    def deviations(self) -> Tuple[Fraction, ...]:
        return tuple(abs(f - Fraction(1, self.N)) for f in self.frequencies)

    def csv_rows(self) -> List[List[str]]:
        rows = [["cell", "count", "frequency", "deviation"]]
        for i, (c, f, d) in enumerate(zip(self.counts, self.frequencies, self.deviations)):
            rows.append([str(i), str(c), str(f), str(d)])
        return rows


def equidist_stats(N: int, prog: Progression, M: int, epsilon) -> EquidistDiagnostics:
    if M < 0:
        raise ValueError("M must be >= 0")
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    try:
        terms = LinearTerms(prog.x0, prog.delta)
        index = lambda n: terms.cell_and_index(n, N)[1]
    except TypeError:
        index = lambda n: locate_subinterval(prog.x0 + n * prog.delta, N)
    counts = [0] * N
    en, ed = epsilon.numerator, epsilon.denominator
    last_bad = -1
    for n in range(M + 1):
        counts[index(n)] += 1
        # |c0/(n+1) - 1/N| >= eps  <=>  |N*c0 - (n+1)| * ed >= en * N * (n+1)
        if abs(N * counts[0] - (n + 1)) * ed >= en * N * (n + 1):
            last_bad = n
    L = None if last_bad == M else last_bad
    return EquidistDiagnostics(N, M, tuple(counts), epsilon, L)
