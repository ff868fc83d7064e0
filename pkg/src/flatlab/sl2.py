"""2x2 matrices, the one-parameter flows and the three SL2(R) decompositions.

Conventions used throughout the package::

    g_t    = diag(e^t, e^-t)          geodesic flow
    h_s    = [[1, s], [0, 1]]         horocycle flow
    hhat_s = [[1, 0], [s, 1]]         opposite horocycle flow
    r_x    = [[cos x, -sin x], [sin x, cos x]]

A :class:`Mat2` is *exact* when all four entries are :class:`ExactReal`;
otherwise it is a float matrix.  Exact operands stay exact, anything that
touches a float becomes a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import MixedFieldError, NotUnimodular, ScalarSyntaxError, SingularMatrix
from .exact import ExactReal, as_exact, exact_sqrt, parse_scalar

FLOAT_TOL = 1e-12


def _is_exact_scalar(x) -> bool:
    return isinstance(x, (ExactReal, int, Fraction))


@dataclass(frozen=True)
class Mat2:
    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if all(_is_exact_scalar(e) for e in entries):
            for name, e in zip("abcd", entries):
                object.__setattr__(self, name, as_exact(e))
        else:
            for name, e in zip("abcd", entries):
                object.__setattr__(self, name, float(e))

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1, 0, 0, 1)

    @classmethod
    def iota(cls) -> Mat2:
        return cls(0, -1, 1, 0)

    @classmethod
    def h(cls, s) -> Mat2:
        return cls(1, s, 0, 1)

    @classmethod
    def hhat(cls, s) -> Mat2:
        return cls(1, 0, s, 1)

    @classmethod
    def g(cls, t) -> Mat2:
        if _is_exact_scalar(t) and t == 0:
            return cls.identity()
        t = float(t)
        return cls(math.exp(t), 0.0, 0.0, math.exp(-t))

    @classmethod
    def diag(cls, x, y) -> Mat2:
        return cls(x, 0, 0, y)

    @classmethod
    def rotation(cls, theta) -> Mat2:
        if _is_exact_scalar(theta) and theta == 0:
            return cls.identity()
        theta = float(theta)
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    @classmethod
    def from_numpy(cls, arr) -> Mat2:
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    @classmethod
    def parse(cls, text: str) -> Mat2:
        """Parse ``"a,b,c,d"``; entries use the exact scalar grammar or floats."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ScalarSyntaxError(f"expected four comma-separated entries, got {text!r}")
        entries = []
        for p in parts:
            try:
                entries.append(parse_scalar(p))
            except ScalarSyntaxError:
                entries.append(float(p))
        return cls(*entries)

    # -- algebra ------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return isinstance(self.a, ExactReal)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def _promote(self, other: Mat2) -> tuple[Mat2, Mat2]:
        if self.exact and other.exact:
            return self, other
        return self.as_float(), other.as_float()

    def __matmul__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        x, y = self._promote(other)
        return Mat2(
            x.a * y.a + x.b * y.c,
            x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d,
        )

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> Mat2:
        det = self.det()
        if det == 0:
            raise SingularMatrix("matrix is singular")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def transpose(self) -> Mat2:
        return Mat2(self.a, self.c, self.b, self.d)

    def apply(self, v):
        x, y = v
        if not self.exact:
            x, y = float(x), float(y)
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def as_float(self) -> Mat2:
        return Mat2(*(float(e) for e in self.entries))

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])

    def frobenius_distance(self, other: Mat2) -> float:
        return float(np.linalg.norm(self.to_numpy() - other.to_numpy()))

    def __str__(self) -> str:
        return "[[{}, {}], [{}, {}]]".format(*(_fmt_entry(e) for e in self.entries))


def _fmt_entry(e) -> str:
    return str(e) if isinstance(e, ExactReal) else format(e, ".17g")


def _check_unimodular(A: Mat2) -> None:
    det = A.det()
    if A.exact:
        if det != 1:
            raise NotUnimodular(f"det = {det}, expected 1")
    elif abs(det - 1.0) > 1e-9:
        raise NotUnimodular(f"det = {det!r}, expected 1")


# -- decompositions ---------------------------------------------------------


class Iwasawa(NamedTuple):
    k: Mat2
    a: Mat2
    n: Mat2

    def product(self) -> Mat2:
        return self.k @ self.a @ self.n


class Cartan(NamedTuple):
    k: Mat2
    a: Mat2
    k2: Mat2

    def product(self) -> Mat2:
        return self.k @ self.a @ self.k2


class Bruhat(NamedTuple):
    left: Mat2
    a: Mat2
    n: Mat2

    @property
    def branch(self) -> str:
        """``"nbar"`` for the lower-unipotent branch, ``"iota"`` otherwise."""
        return "iota" if self.left.a == 0 else "nbar"

    def product(self) -> Mat2:
        return self.left @ self.a @ self.n


def iwasawa(A: Mat2) -> Iwasawa:
    """``A = k a n`` with ``k`` a rotation, ``a`` positive diagonal, ``n`` upper unipotent.

    Exact whenever the first-column norm is quadratic over the entry field,
    which covers every rational matrix.
    """
    _check_unimodular(A)
    if A.exact:
        r = exact_sqrt(A.a * A.a + A.c * A.c)
        if r is not None:
            try:
                k = Mat2(A.a / r, -A.c / r, A.c / r, A.a / r)
                s = (A.a * A.b + A.c * A.d) / (r * r)
                return Iwasawa(k, Mat2.diag(r, 1 / r), Mat2.h(s))
            except MixedFieldError:
                pass
    theta, t, s = _kernels.iwasawa_np(A.to_numpy()[None])
    return Iwasawa(Mat2.rotation(theta[0]), Mat2.g(t[0]), Mat2.h(float(s[0])))


def cartan(A: Mat2) -> Cartan:
    """``A = k a k'`` with ``a = diag(sigma, 1/sigma)``, ``sigma >= 1`` the top singular value."""
    _check_unimodular(A)
    if A.exact:
        if A.transpose() @ A == Mat2.identity():
            return Cartan(A, Mat2.identity(), Mat2.identity())
        if A.b == 0 and A.c == 0 and A.a > 0 and A.a >= A.d:
            return Cartan(Mat2.identity(), A, Mat2.identity())
    phi, t, theta = _kernels.cartan_np(A.to_numpy()[None])
    return Cartan(Mat2.rotation(phi[0]), Mat2.g(t[0]), Mat2.rotation(theta[0]))


def bruhat(A: Mat2) -> Bruhat:
    """Two-branch Bruhat factorisation; exact on exact input."""
    _check_unimodular(A)
    a, b, c, d = A.entries
    if a != 0:
        return Bruhat(Mat2.hhat(c / a), Mat2.diag(a, 1 / a), Mat2.h(b / a))
    return Bruhat(Mat2.iota(), Mat2.diag(c, 1 / c), Mat2.h(d / c))


# -- identities -------------------------------------------------------------


class RotationNAN(NamedTuple):
    factors: tuple[Mat2, Mat2, Mat2]
    product: Mat2
    angle: float  # the product equals r_angle
    residual: float  # Frobenius distance between product and r_angle


def rotation_angle(R: Mat2) -> float:
    """Angle of a (float) rotation matrix."""
    return math.atan2(float(R.c), float(R.a))


def rotation_nan(theta: float) -> RotationNAN:
    """Multiply ``hhat_{-tan x} g_{log cos x} h_{tan x}`` and identify the rotation it equals.

    With the conventions of this module the product is ``r_{-x}``; the
    caller gets the measured angle rather than an assumed sign.
    """
    theta = float(theta)
    if not abs(theta) < math.pi / 2:
        raise ValueError("need |theta| < pi/2 for log(cos(theta))")
    tn = math.tan(theta)
    factors = (Mat2.hhat(-tn), Mat2.g(math.log(math.cos(theta))), Mat2.h(tn))
    prod = factors[0] @ factors[1] @ factors[2]
    angle = rotation_angle(prod)
    return RotationNAN(factors, prod, angle, prod.frobenius_distance(Mat2.rotation(angle)))


class ConjShearCheck(NamedTuple):
    t: float
    u: float
    symbolic: bool
    residual: float


def conj_shear(t, u) -> ConjShearCheck:
    """Verify ``g_t h_u g_{-t} = h_{u e^{2t}}``.

    The symbolic half treats ``lam = e^t`` as an indeterminate: after
    clearing ``lam^2`` every entry difference is a polynomial of degree at
    most 4 in ``lam``, so vanishing at five distinct rational ``lam`` proves
    the identity for all ``t``.  The numeric half evaluates both sides at the
    given ``(t, u)``.
    """
    u_exact = as_exact(u) if _is_exact_scalar(u) else as_exact(Fraction(1, 3))
    symbolic = True
    for lam in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(5, 7)):
        L = as_exact(lam)
        lhs = Mat2.diag(L, 1 / L) @ Mat2.h(u_exact) @ Mat2.diag(1 / L, L)
        rhs = Mat2.h(u_exact * L * L)
        symbolic &= lhs == rhs
    lhs = Mat2.g(t) @ Mat2.h(float(u)) @ Mat2.g(-float(t))
    rhs = Mat2.h(float(u) * math.exp(2 * float(t)))
    return ConjShearCheck(float(t), float(u), symbolic, lhs.frobenius_distance(rhs))


DECOMPOSITIONS = {"iwasawa": iwasawa, "cartan": cartan, "bruhat": bruhat}


def decompose(which: str, A: Mat2):
    try:
        return DECOMPOSITIONS[which](A)
    except KeyError:
        raise ValueError(f"unknown decomposition {which!r}") from None


@dataclass(frozen=True)
class DecompositionReport:
    """A decomposition together with its input and the recomposition error."""

    which: str
    matrix: Mat2
    factors: tuple
    residual: float

    @property
    def branch(self) -> str:
        return self.factors.branch if isinstance(self.factors, Bruhat) else ""

    @classmethod
    def of(cls, which: str, A: Mat2) -> DecompositionReport:
        f = decompose(which, A)
        return cls(which, A, f, f.product().frobenius_distance(A))
