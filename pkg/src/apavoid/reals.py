"""Certified real numbers.

Three kinds of value are supported:

* rationals, carried as :class:`Quadratic` with a zero surd part;
* quadratic irrationals ``a + b*sqrt(d)`` with rational ``a, b`` and a
  squarefree ``d > 1``, on which floor and sign are decided exactly;
* :class:`Enclosure`, an opaque value known only through rational
  enclosures of shrinking width. Questions that cannot be settled before the
  width drops below ``max_width`` raise :class:`~apavoid.errors.Undecidable`.

Plain ``int`` and ``Fraction`` are accepted wherever a real is expected.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Callable, Tuple, Union

from .errors import UndecidableBoundary, UndecidableFloor

Rational = Fraction
Bounds = Tuple[Fraction, Fraction]

DEFAULT_MAX_WIDTH = Fraction(1, 2**256)


def _split_square(d: int) -> Tuple[int, int]:
    """Return ``(s, c)`` with ``d == s*s*c``; ``c`` is squarefree when ``d``
    has no prime factor above 10**4 occurring squared."""
    r = math.isqrt(d)
    if r * r == d:
        return r, 1
    s, c = 1, d
    p = 2
    while p * p <= c and p <= 10_000:
        while c % (p * p) == 0:
            c //= p * p
            s *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(c)
    if r * r == c:
        return s * r, 1
    return s, c


def _ceil_log2(t: Fraction) -> int:
    # smallest k >= 0 with 2**k >= t
    if t <= 1:
        return 0
    c = -((-t.numerator) // t.denominator)
    return (c - 1).bit_length()


def _sqrt_bounds(num: int, den: int, width: Fraction) -> Bounds:
    """Enclosure of sqrt(num)/den (num not a perfect square) of width <= width."""
    k = _ceil_log2(1 / (width * den))
    r = math.isqrt(num << (2 * k))
    scale = den << k
    return Fraction(r, scale), Fraction(r + 1, scale)


class CertifiedReal:
    """Common interface and operator plumbing."""

    __slots__ = ()

    kind: str

    # -- interface ------------------------------------------------------

    def enclosure(self, width) -> Bounds:
        raise NotImplementedError

    def refine(self, width) -> "CertifiedReal":
        raise NotImplementedError

    def floor(self) -> int:
        raise NotImplementedError

    def sign(self) -> int:
        raise NotImplementedError

    @property
    def current_enclosure(self) -> Bounds:
        return self.enclosure(self._width)

    @property
    def is_exact(self) -> bool:
        return self.kind != "enclosure"

    def ceil(self) -> int:
        return -(-self).floor()

    def __floor__(self):
        return self.floor()

    def __ceil__(self):
        return self.ceil()

    def __float__(self):
        lo, hi = self.enclosure(Fraction(1, 2**60))
        return float((lo + hi) / 2)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _add(other, -self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _mul(self, _inv(other))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return _mul(other, _inv(self))

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison -----------------------------------------------------

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        if _coerce(other) is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if _coerce(other) is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if _coerce(other) is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if _coerce(other) is None:
            return NotImplemented
        return self._cmp(other) >= 0


class Quadratic(CertifiedReal):
    """Exact value ``a + b*sqrt(d)``; rational when ``b == 0`` (then ``d == 1``)."""

    __slots__ = ("a", "b", "d", "_width")

    def __init__(self, a=0, b=0, d=1, width=1):
        a = Fraction(a)
        b = Fraction(b)
        d = int(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b == 0 or d == 0:
            b, d = Fraction(0), 1
        else:
            s, c = _split_square(d)
            if c == 1:
                a, b, d = a + b * s, Fraction(0), 1
            else:
                b, d = b * s, c
        self.a, self.b, self.d = a, b, d
        self._width = Fraction(width)

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> "Quadratic":
        obj = object.__new__(cls)
        if b == 0:
            b, d = Fraction(0), 1
        obj.a, obj.b, obj.d = a, b, d
        obj._width = Fraction(1)
        return obj

    @classmethod
    def sqrt(cls, d) -> "Quadratic":
        """Exact square root of a nonnegative rational."""
        d = Fraction(d)
        if d < 0:
            raise ValueError("negative radicand")
        # sqrt(p/q) = sqrt(p*q)/q
        return cls(0, Fraction(1, d.denominator), d.numerator * d.denominator)

    @property
    def kind(self) -> str:
        return "rational" if self.b == 0 else "quadirr"

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def refine(self, width) -> "Quadratic":
        width = Fraction(width)
        if width <= 0:
            raise ValueError("width must be positive")
        obj = Quadratic._raw(self.a, self.b, self.d)
        obj._width = width
        return obj

    def enclosure(self, width) -> Bounds:
        if self.b == 0:
            return self.a, self.a
        width = Fraction(width)
        if width <= 0:
            raise ValueError("width must be positive")
        b = abs(self.b)
        lo, hi = _sqrt_bounds(b.numerator**2 * self.d, b.denominator, width)
        if self.b < 0:
            lo, hi = -hi, -lo
        return self.a + lo, self.a + hi

    def floor(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return a.numerator // a.denominator
        q = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        A = a.numerator * (q // a.denominator)
        B = b.numerator * (q // b.denominator)
        # B*sqrt(d) lies strictly between F and F+1
        F = math.isqrt(B * B * self.d)
        if B < 0:
            F = -F - 1
        # no multiple of q lies strictly between A+F and A+F+1
        return (A + F) // q

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        if b == 0:
            return sa
        sb = 1 if b > 0 else -1
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a**2 with b**2 * d (never equal)
        return sa if a * a > b * b * self.d else sb

    def conjugate(self) -> "Quadratic":
        return Quadratic._raw(self.a, -self.b, self.d)

    def __neg__(self):
        return Quadratic._raw(-self.a, -self.b, self.d)

    def __eq__(self, other):
        if isinstance(other, Quadratic):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, CertifiedReal):
            return NotImplemented
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __repr__(self):
        return f"Quadratic({format_exact(self)!r})"

    def __str__(self):
        return format_exact(self)


class Enclosure(CertifiedReal):
    """Opaque real given by ``approx(width) -> (lo, hi)`` with ``hi - lo <= width``."""

    __slots__ = ("_approx", "max_width", "_width")

    kind = "enclosure"

    def __init__(self, approx: Callable[[Fraction], Bounds], max_width=None, width=1):
        self._approx = approx
        self.max_width = Fraction(DEFAULT_MAX_WIDTH if max_width is None else max_width)
        self._width = Fraction(width)

    def enclosure(self, width) -> Bounds:
        width = Fraction(width)
        if width <= 0:
            raise ValueError("width must be positive")
        lo, hi = self._approx(width)
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi or hi - lo > width:
            raise ValueError(f"approximation [{lo}, {hi}] violates width {width}")
        return lo, hi

    def refine(self, width) -> "Enclosure":
        width = Fraction(width)
        if width <= 0:
            raise ValueError("width must be positive")
        return Enclosure(self._approx, self.max_width, width)

    def _widths(self):
        w = Fraction(1)
        while w >= self.max_width:
            yield w
            w /= 16
        yield self.max_width

    def floor(self) -> int:
        for w in self._widths():
            lo, hi = self.enclosure(w)
            f = math.floor(lo)
            if f == math.floor(hi):
                return f
        raise UndecidableFloor(f"floor not settled at width {self.max_width}")

    def sign(self) -> int:
        for w in self._widths():
            lo, hi = self.enclosure(w)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if lo == hi == 0:
                return 0
        raise UndecidableBoundary(f"sign not settled at width {self.max_width}")

    def __neg__(self):
        approx = self._approx

        def neg(w):
            lo, hi = approx(w)
            return -hi, -lo

        return Enclosure(neg, self.max_width)

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def __repr__(self):
        lo, hi = self.current_enclosure
        return f"Enclosure([{lo}, {hi}])"


RealLike = Union[int, Fraction, CertifiedReal]


def _coerce(x):
    if isinstance(x, CertifiedReal):
        return x
    if isinstance(x, (int, Fraction)):
        return Quadratic._raw(Fraction(x), Fraction(0), 1)
    return None


def as_real(x) -> CertifiedReal:
    """Convert ``int``, ``Fraction`` or an exact string to a certified real."""
    if isinstance(x, str):
        return parse_exact(x)
    r = _coerce(x)
    if r is None:
        raise TypeError(f"cannot use {type(x).__name__} as an exact real")
    return r


def simplify(x):
    """Collapse rational-kind values to ``Fraction``; leave others alone."""
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Quadratic) and x.b == 0:
        return x.a
    return x


def _max_width(*xs) -> Fraction:
    ws = [x.max_width for x in xs if isinstance(x, Enclosure)]
    return min(ws) if ws else DEFAULT_MAX_WIDTH


def _compatible(x: CertifiedReal, y: CertifiedReal):
    if isinstance(x, Quadratic) and isinstance(y, Quadratic):
        if x.b == 0:
            return y.d
        if y.b == 0 or x.d == y.d:
            return x.d
    return None


def _add(x: CertifiedReal, y: CertifiedReal) -> CertifiedReal:
    d = _compatible(x, y)
    if d is not None:
        return Quadratic._raw(x.a + y.a, x.b + y.b, d)

    def approx(w):
        xl, xh = x.enclosure(w / 2)
        yl, yh = y.enclosure(w / 2)
        return xl + yl, xh + yh

    return Enclosure(approx, _max_width(x, y))


def _mul(x: CertifiedReal, y: CertifiedReal) -> CertifiedReal:
    d = _compatible(x, y)
    if d is not None:
        return Quadratic._raw(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d)

    def bound(z):
        lo, hi = z.enclosure(1)
        return max(abs(lo), abs(hi)) + 1

    def approx(w):
        # product width <= (|x|+1) wy + (|y|+1) wx for enclosures of width <= 1
        step = min(Fraction(1), w / (bound(x) + bound(y)))
        while True:
            xl, xh = x.enclosure(step)
            yl, yh = y.enclosure(step)
            ps = (xl * yl, xl * yh, xh * yl, xh * yh)
            lo, hi = min(ps), max(ps)
            if hi - lo <= w:
                return lo, hi
            step /= 2

    return Enclosure(approx, _max_width(x, y))


def _inv(y: CertifiedReal) -> CertifiedReal:
    if isinstance(y, Quadratic):
        if y.b == 0:
            if y.a == 0:
                raise ZeroDivisionError("division by zero")
            return Quadratic._raw(1 / y.a, Fraction(0), 1)
        norm = y.a * y.a - y.b * y.b * y.d
        return Quadratic._raw(y.a / norm, -y.b / norm, y.d)
    s = y.sign()
    if s == 0:
        raise ZeroDivisionError("division by zero")
    lo, hi = next(
        (lo, hi) for lo, hi in (y.enclosure(w) for w in y._widths()) if lo > 0 or hi < 0
    )
    c = min(abs(lo), abs(hi))

    def approx(w):
        # any enclosure of width <= c/2 stays at distance >= c/2 from zero
        step = min(c / 2, w * c * c / 4)
        lo, hi = y.enclosure(step)
        return 1 / hi, 1 / lo

    return Enclosure(approx, y.max_width)


# -- derived operations -----------------------------------------------------


def floor(x) -> int:
    return as_real(x).floor()


def frac(x, precision=None) -> CertifiedReal:
    """Fractional part ``x - floor(x)`` in ``[0, 1)``.

    For inexact kinds the result is refined to ``precision`` (default: the
    value's maximum refinement width).
    """
    x = as_real(x)
    f = x - x.floor()
    if precision is not None:
        precision = Fraction(precision)
        if precision <= 0:
            raise ValueError("precision must be positive")
        f = f.refine(precision)
    return f


def locate_subinterval(x, N: int) -> int:
    """Index ``i`` with ``frac(x)`` in ``[i/N, (i+1)/N)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    x = as_real(x)
    try:
        return (N * x).floor() - N * x.floor()
    except UndecidableFloor as exc:
        raise UndecidableBoundary(str(exc)) from exc


def ceil_div(a, b) -> int:
    """Exact ``ceil(a / b)`` for rationals with ``b > 0``."""
    a, b = Fraction(a), Fraction(b)
    if b <= 0:
        raise ValueError("divisor must be positive")
    q = a / b
    return -((-q.numerator) // q.denominator)


def compare(x, y) -> int:
    """Sign of ``x - y`` (exact for rational and quadratic kinds)."""
    return (as_real(x) - as_real(y)).sign()


def sign(x) -> int:
    return as_real(x).sign()


# -- exact string forms -------------------------------------------------------


def format_exact(x) -> str:
    """Exact string: ``"p/q"``, ``"p"`` or ``"a+b*sqrt(d)"``."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Quadratic):
        if x.b == 0:
            return str(x.a)
        surd = f"sqrt({x.d})" if abs(x.b) == 1 else f"{abs(x.b)}*sqrt({x.d})"
        if x.a == 0:
            return surd if x.b > 0 else "-" + surd
        return f"{x.a}{'+' if x.b > 0 else '-'}{surd}"
    raise TypeError(f"{x!r} has no exact string form")


_BINOPS = {
    ast.Add: lambda p, q: p + q,
    ast.Sub: lambda p, q: p - q,
    ast.Mult: lambda p, q: p * q,
    ast.Div: lambda p, q: p / q,
}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return Fraction(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
        exp = _eval(node.right)
        if not (isinstance(exp, Fraction) and exp.denominator == 1 and exp >= 0):
            raise ValueError("exponent must be a nonnegative integer")
        base = as_real(_eval(node.left))
        out = as_real(1)
        for _ in range(int(exp)):
            out = out * base
        return simplify(out)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
        and not node.keywords
    ):
        arg = _eval(node.args[0])
        if not isinstance(arg, Fraction):
            raise ValueError("sqrt argument must be rational")
        return simplify(Quadratic.sqrt(arg))
    raise ValueError(f"unsupported syntax: {ast.dump(node)}")


def parse_exact(text: str):
    """Parse an exact number such as ``"3"``, ``"-7/2"``, ``"1/2+sqrt(2)"``
    or ``"(1+sqrt(5))/2"``.

    Returns a ``Fraction`` for rational input and a :class:`Quadratic`
    otherwise. Decimal and floating input is rejected.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty number")
    if "." in text:
        raise ValueError(f"decimal input {text!r} is not exact; use p/q")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc
    try:
        value = _eval(tree)
    except ZeroDivisionError as exc:
        raise ValueError(f"division by zero in {text!r}") from exc
    return simplify(value)


class LinearTerms:
    """Floors of ``x0 + n*delta`` for exact ``x0, delta`` in one quadratic field.

    Works on a shared integer denominator so that each query is a single
    ``isqrt``; used by the long scans in the escape engine.
    """

    __slots__ = ("A0", "A1", "B0", "B1", "q", "d")

    def __init__(self, x0, delta):
        x0, delta = as_real(x0), as_real(delta)
        d = _compatible(x0, delta)
        if d is None:
            raise TypeError("terms need exact values in a common quadratic field")
        dens = (x0.a.denominator, x0.b.denominator, delta.a.denominator, delta.b.denominator)
        q = 1
        for den in dens:
            q = q * den // math.gcd(q, den)
        self.q, self.d = q, d
        self.A0 = x0.a.numerator * (q // x0.a.denominator)
        self.B0 = x0.b.numerator * (q // x0.b.denominator)
        self.A1 = delta.a.numerator * (q // delta.a.denominator)
        self.B1 = delta.b.numerator * (q // delta.b.denominator)

    def floor(self, n: int, scale: int = 1) -> int:
        """``floor(scale * (x0 + n*delta))``."""
        A = scale * (self.A0 + n * self.A1)
        B = scale * (self.B0 + n * self.B1)
        if B == 0:
            return A // self.q
        F = math.isqrt(B * B * self.d)
        if B < 0:
            F = -F - 1
        return (A + F) // self.q

    def cell_and_index(self, n: int, N: int) -> Tuple[int, int]:
        """``(floor(x_n), i)`` with ``frac(x_n)`` in ``[i/N, (i+1)/N)``."""
        m = self.floor(n)
        return m, self.floor(n, N) - N * m
