"""Exact arithmetic in Q and in real quadratic fields Q(sqrt(D)).

An :class:`ExactReal` stores ``(num_a + num_b*sqrt(D)) / den`` with Python
integers, ``den > 0`` and ``gcd(num_a, num_b, den) == 1``.  A value with a
vanishing irrational part is always stored with ``D == 0``, so rationals mix
freely with every field while two genuinely different fields never do.

Sign and comparison are decided by integer case analysis on the rational
part and the conjugate norm; no floating point is involved.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

from .errors import DivisionByZero, MixedFieldError, ScalarSyntaxError, ZeroInput

__all__ = [
    "ExactReal",
    "QSpanReport",
    "as_exact",
    "commensurable",
    "common_field",
    "exact_sqrt",
    "parse_scalar",
    "qspan_dim",
    "squarefree_part",
]


def squarefree_part(n: int) -> tuple[int, int]:
    """Split ``n > 0`` as ``(s, f)`` with ``n == s*s*f`` and ``f`` square-free."""
    if n <= 0:
        raise ValueError("squarefree_part needs a positive integer")
    s, f = 1, 1
    p = 2
    # after removing every prime up to cbrt(n) the cofactor is 1, p, p^2 or p*q
    while p * p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(n)
    if r * r == n:
        s *= r
    else:
        f *= n
    return s, f


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


class ExactReal:
    """Element of Q or of a real quadratic field Q(sqrt(D)).

    >>> phi = ExactReal(Fraction(1, 2), Fraction(1, 2), 5)
    >>> phi * phi == phi + 1
    True
    """

    __slots__ = ("_na", "_nb", "_den", "_D", "_hash")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0, D: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        if D < 0:
            raise ValueError("D must be nonnegative")
        if b and D == 0:
            raise ValueError("D = 0 forces b = 0")
        if b and D:
            s, f = squarefree_part(D)
            b *= s
            D = f
            if D == 1:
                a, b, D = a + b, Fraction(0), 0
        den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._init(a.numerator * (den // a.denominator), b.numerator * (den // b.denominator), den, D)

    def _init(self, na: int, nb: int, den: int, D: int) -> None:
        if den < 0:
            na, nb, den = -na, -nb, -den
        if nb == 0:
            D = 0
        g = math.gcd(math.gcd(na, nb), den)
        if g > 1:
            na //= g
            nb //= g
            den //= g
        self._na = na
        self._nb = nb
        self._den = den
        self._D = D
        self._hash = None

    @classmethod
    def _raw(cls, na: int, nb: int, den: int, D: int) -> ExactReal:
        x = cls.__new__(cls)
        x._init(na, nb, den, D)
        return x

    # -- accessors ----------------------------------------------------------

    @property
    def a(self) -> Fraction:
        return Fraction(self._na, self._den)

    @property
    def b(self) -> Fraction:
        return Fraction(self._nb, self._den)

    @property
    def D(self) -> int:
        return self._D

    def is_rational(self) -> bool:
        return self._nb == 0

    def is_zero(self) -> bool:
        return self._na == 0 and self._nb == 0

    def conjugate(self) -> ExactReal:
        return ExactReal._raw(self._na, -self._nb, self._den, self._D)

    def norm(self) -> Fraction:
        return Fraction(self._na * self._na - self._D * self._nb * self._nb, self._den * self._den)

    def to_fraction(self) -> Fraction:
        if self._nb:
            raise ValueError(f"{self} is irrational")
        return Fraction(self._na, self._den)

    # -- coercion -----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> ExactReal | None:
        if isinstance(other, ExactReal):
            return other
        if isinstance(other, int):
            return ExactReal._raw(other, 0, 1, 0)
        if isinstance(other, Rational):
            return ExactReal._raw(other.numerator, 0, other.denominator, 0)
        return None

    def _field_with(self, other: ExactReal) -> int:
        if self._D == other._D or other._D == 0:
            return self._D
        if self._D == 0:
            return other._D
        raise MixedFieldError(f"cannot combine Q(sqrt({self._D})) with Q(sqrt({other._D}))")

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self._field_with(o)
        if self._den == o._den:
            return ExactReal._raw(self._na + o._na, self._nb + o._nb, self._den, D)
        return ExactReal._raw(
            self._na * o._den + o._na * self._den,
            self._nb * o._den + o._nb * self._den,
            self._den * o._den,
            D,
        )

    __radd__ = __add__

    def __neg__(self) -> ExactReal:
        return ExactReal._raw(-self._na, -self._nb, self._den, self._D)

    def __pos__(self) -> ExactReal:
        return self

    def __abs__(self) -> ExactReal:
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self._field_with(o)
        return ExactReal._raw(
            self._na * o._na + D * self._nb * o._nb,
            self._na * o._nb + self._nb * o._na,
            self._den * o._den,
            D,
        )

    __rmul__ = __mul__

    def inverse(self) -> ExactReal:
        # 1/x = den * conj / (na^2 - D nb^2)
        n = self._na * self._na - self._D * self._nb * self._nb
        if n == 0:
            raise DivisionByZero("division by zero")
        return ExactReal._raw(self._den * self._na, -self._den * self._nb, n, self._D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._field_with(o)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> ExactReal:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ExactReal._raw(1, 0, 1, 0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order --------------------------------------------------------------

    def sign(self) -> int:
        sa, sb = _sign(self._na), _sign(self._nb)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        if self._na * self._na > self._D * self._nb * self._nb:
            return sa
        return sb

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _cmp(self, other) -> int | None:
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign()

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return self.is_rational() and Fraction(self._na, self._den) == other
            return NotImplemented
        return self._na == o._na and self._nb == o._nb and self._den == o._den and (
            self._D == o._D or self._nb == 0
        )

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self) -> int:
        if self._hash is None:
            if self._nb == 0:
                self._hash = hash(Fraction(self._na, self._den))
            else:
                self._hash = hash((self._na, self._nb, self._den, self._D))
        return self._hash

    # -- conversion ---------------------------------------------------------

    def __float__(self) -> float:
        if self._nb == 0:
            return float(Fraction(self._na, self._den))
        r = math.sqrt(self._D)
        a = Fraction(self._na, self._den)
        b = Fraction(self._nb, self._den)
        if _sign(self._na) * _sign(self._nb) >= 0:
            return float(a) + float(b) * r
        # opposite signs: go through the conjugate to avoid cancellation
        return float(self.norm()) / (float(a) - float(b) * r)

    def __repr__(self) -> str:
        return f"ExactReal({self})"

    def __str__(self) -> str:
        a = _fmt_rational(self._na, self._den)
        if self._nb == 0:
            return a
        op = "+" if self._nb > 0 else "-"
        return f"{a}{op}{_fmt_rational(abs(self._nb), self._den)}*sqrt({self._D})"

    def __reduce__(self):
        return (ExactReal._raw, (self._na, self._nb, self._den, self._D))


def _fmt_rational(n: int, d: int) -> str:
    g = math.gcd(n, d)
    n //= g
    d //= g
    return str(n) if d == 1 else f"{n}/{d}"


Scalar = ExactReal | int | Fraction


def as_exact(x) -> ExactReal:
    """Coerce ints, Fractions, ExactReal and scalar strings to ExactReal."""
    if isinstance(x, ExactReal):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a string")
    c = ExactReal._coerce(x)
    if c is None:
        raise TypeError(f"cannot interpret {x!r} as an exact scalar")
    return c


def common_field(values: Iterable) -> int:
    """The D shared by all irrational values, or 0 if all are rational."""
    D = 0
    for v in values:
        v = as_exact(v)
        if v.D:
            if D and v.D != D:
                raise MixedFieldError(f"values from Q(sqrt({D})) and Q(sqrt({v.D}))")
            D = v.D
    return D


# -- textual grammar --------------------------------------------------------

_RAT = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?P<a>-?{_RAT})?\s*"
    rf"(?:(?P<op>[+-])?\s*(?:(?P<b>{_RAT})\s*\*\s*)?sqrt\(\s*(?P<D>\d+)\s*\))?\s*$"
)


def _parse_rat(s: str) -> Fraction:
    if "/" in s:
        n, d = s.split("/")
        if int(d) == 0:
            raise ScalarSyntaxError(f"zero denominator in {s!r}")
        return Fraction(int(n), int(d))
    return Fraction(int(s))


def parse_scalar(text: str) -> ExactReal:
    """Parse ``INT``, ``INT/INT``, ``a+b*sqrt(D)`` or ``a-b*sqrt(D)``.

    The forms ``sqrt(D)``, ``-b*sqrt(D)`` and ``a+sqrt(D)`` are accepted as
    shorthands; printing always produces the canonical long form.
    """
    m = _SCALAR_RE.match(text)
    if not m or (m.group("a") is None and m.group("D") is None):
        raise ScalarSyntaxError(f"not an exact scalar: {text!r}")
    a = _parse_rat(m.group("a")) if m.group("a") else Fraction(0)
    if m.group("D") is None:
        return ExactReal(a)
    op = m.group("op")
    if m.group("a") is not None and op is None:
        # "3sqrt(2)" style juxtaposition is ambiguous
        raise ScalarSyntaxError(f"missing operator in {text!r}")
    b = _parse_rat(m.group("b")) if m.group("b") else Fraction(1)
    if op == "-":
        b = -b
    D = int(m.group("D"))
    if D == 0:
        return ExactReal(a)
    return ExactReal(a, b, D)


# -- square roots -----------------------------------------------------------


def _rational_sqrt(q: Fraction) -> ExactReal | None:
    """sqrt(q) for rational q >= 0, as an element of some Q(sqrt(D))."""
    if q < 0:
        return None
    if q == 0:
        return ExactReal(0)
    s, f = squarefree_part(q.numerator * q.denominator)
    if f == 1:
        return ExactReal(Fraction(s, q.denominator))
    return ExactReal(0, Fraction(s, q.denominator), f)


def _perfect_square(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def exact_sqrt(x) -> ExactReal | None:
    """Nonnegative square root if it is quadratic over Q, else ``None``.

    For a rational argument the root may land in a new field; for an
    irrational ``x`` in Q(sqrt(D)) the root must stay in Q(sqrt(D)).
    """
    x = as_exact(x)
    if x.sign() < 0:
        return None
    if x.is_rational():
        return _rational_sqrt(x.to_fraction())
    A, B, D = x.a, x.b, x.D
    r = _perfect_square(x.norm())
    if r is None:
        return None
    for p2 in ((A + r) / 2, (A - r) / 2):
        p = _perfect_square(p2)
        if p is None or p == 0:
            continue
        q = B / (2 * p)
        cand = ExactReal(p, q, D)
        if cand.sign() < 0:
            cand = -cand
        if cand * cand == x:
            return cand
    return None


# -- Q-linear algebra -------------------------------------------------------


@dataclass(frozen=True)
class QSpanReport:
    """Dimension of the Q-span of a list, with a basis and all relations.

    ``relations`` is a basis of the relation lattice: primitive integer
    vectors ``c`` with ``sum(c[i] * values[i]) == 0``.
    """

    dimension: int
    basis_indices: tuple[int, ...]
    relations: tuple[tuple[int, ...], ...]


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    lcm = reduce(lambda x, y: x * y // math.gcd(x, y), (v.denominator for v in vec), 1)
    ints = [int(v * lcm) for v in vec]
    g = reduce(math.gcd, ints, 0) or 1
    ints = [i // g for i in ints]
    lead = next((i for i in ints if i), 1)
    if lead < 0:
        ints = [-i for i in ints]
    return tuple(ints)


def qspan_dim(values: Sequence) -> QSpanReport:
    if not values:
        raise ValueError("qspan_dim needs at least one value")
    xs = [as_exact(v) for v in values]
    common_field(xs)
    n = len(xs)
    rows = [[x.a for x in xs], [x.b for x in xs]]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, 2) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(2):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == 2:
            break
    relations = []
    for free in range(n):
        if free in pivots:
            continue
        vec = [Fraction(0)] * n
        vec[free] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -rows[row][free]
        relations.append(_primitive(vec))
    return QSpanReport(len(pivots), tuple(pivots), tuple(relations))


def commensurable(x, y) -> Fraction | None:
    """The rational ratio ``x/y`` if it exists, else ``None``."""
    x, y = as_exact(x), as_exact(y)
    if x.is_zero() or y.is_zero():
        raise ZeroInput("commensurable() needs nonzero inputs")
    q = x / y
    return q.to_fraction() if q.is_rational() else None
