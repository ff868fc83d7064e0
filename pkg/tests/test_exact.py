from __future__ import annotations

import pickle
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatlab.errors import DivisionByZero, MixedFieldError, ScalarSyntaxError, ZeroInput
from flatlab.exact import ExactReal, commensurable, exact_sqrt, parse_scalar, qspan_dim, squarefree_part

PHI = ExactReal(Fraction(1, 2), Fraction(1, 2), 5)
SQRT2 = ExactReal(0, 1, 2)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
fields = st.sampled_from([2, 3, 5, 7])


@st.composite
def field_elems(draw, D=None):
    D = draw(fields) if D is None else D
    return ExactReal(draw(rationals), draw(rationals), D)


def test_norm_identity():
    x = ExactReal(1, 1, 5)
    assert x * x.conjugate() == -4


def test_golden_square():
    assert PHI * PHI == ExactReal(Fraction(3, 2), Fraction(1, 2), 5)
    assert PHI * PHI == PHI + 1


def test_squarefree_normalisation():
    assert squarefree_part(12) == (2, 3)
    x = ExactReal(0, 1, 8)  # sqrt(8) = 2 sqrt(2)
    assert x == 2 * SQRT2
    assert x.D == 2


def test_zero_b_forces_rational_field():
    x = ExactReal(3, 0, 5)
    assert x.D == 0 and x.is_rational()
    assert (PHI - PHI).D == 0


def test_mixed_fields_rejected():
    with pytest.raises(MixedFieldError):
        SQRT2 + PHI


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        PHI / (PHI - PHI)


@pytest.mark.parametrize(
    "text, value",
    [
        ("3", ExactReal(3)),
        ("-7/4", ExactReal(Fraction(-7, 4))),
        ("1/2+1/2*sqrt(5)", PHI),
        ("1-2*sqrt(2)", ExactReal(1, -2, 2)),
        ("sqrt(2)", SQRT2),
        ("-3*sqrt(2)", ExactReal(0, -3, 2)),
    ],
)
def test_parse(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("bad", ["", "1/0", "abc", "1+", "2sqrt(3)", "1/2/3"])
def test_parse_rejects(bad):
    with pytest.raises(ScalarSyntaxError):
        parse_scalar(bad)


def test_canonical_print():
    assert str(SQRT2) == "0+1*sqrt(2)"
    assert str(PHI) == "1/2+1/2*sqrt(5)"
    assert str(ExactReal(Fraction(-3, 6))) == "-1/2"


@given(field_elems())
def test_grammar_round_trip(x):
    assert parse_scalar(str(x)) == x
    assert str(parse_scalar(str(x))) == str(x)


@given(field_elems(D=5), field_elems(D=5), field_elems(D=5))
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    if not x.is_zero():
        assert x / x == 1
        assert (y / x) * x == y


@given(field_elems())
def test_hash_and_pickle(x):
    assert pickle.loads(pickle.dumps(x)) == x
    if x.is_rational():
        assert hash(x) == hash(x.to_fraction())


def test_sign_agrees_with_high_precision():
    rng = random.Random(20261019)
    mpmath.mp.dps = 100
    for _ in range(10_000):
        D = rng.choice([2, 3, 5, 7, 11])
        # near-cancelling pairs are the interesting ones for the sign test
        b = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**3))
        a = -b * Fraction(round(mpmath.sqrt(D) * 10**9), 10**9) + Fraction(rng.randint(-3, 3), 10**12)
        x, y = ExactReal(a, b, D), ExactReal(Fraction(rng.randint(-99, 99), 7), 0)
        ref = (mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator * mpmath.sqrt(D)) - (
            mpmath.mpf(y.a.numerator) / y.a.denominator
        )
        expected = (ref > 0) - (ref < 0)
        assert (x - y).sign() == expected
        assert (x < y) == (ref < 0)


def test_float_conversion_avoids_cancellation():
    # 1 - (2/3)...; a huge near-cancelling value converts without losing sign
    x = ExactReal(99, -70, 2)  # 99 - 70 sqrt 2 ~ 0.00505
    assert x.sign() > 0
    assert abs(float(x) - 0.005050633883346584) < 1e-15


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(2) == SQRT2
    assert exact_sqrt(PHI * PHI) == PHI
    assert exact_sqrt(-1) is None
    assert exact_sqrt(PHI) is None  # phi is not a square in Q(sqrt 5)


# -- Q-span and commensurability --------------------------------------------


def test_qspan_examples():
    assert qspan_dim([Fraction(1, 2), 1]).dimension == 1
    assert qspan_dim([1, SQRT2]).dimension == 2
    rep = qspan_dim([1, PHI, PHI * PHI])
    assert rep.dimension == 2
    assert rep.relations == ((1, 1, -1),)


def test_commensurable_examples():
    assert commensurable(Fraction(1, 2), 1) == Fraction(1, 2)
    assert commensurable(PHI, PHI) == 1
    assert commensurable(1, SQRT2) is None
    with pytest.raises(ZeroInput):
        commensurable(0, PHI)


@given(field_elems(D=5), rationals)
def test_rational_multiple_spans_one_dimension(v, r):
    if v.is_zero() or r == 0:
        return
    assert qspan_dim([v, r * v]).dimension == 1


@given(st.lists(field_elems(D=2), min_size=1, max_size=5), st.lists(rationals, min_size=5, max_size=5))
def test_adding_combination_keeps_dimension(vals, coeffs):
    combo = sum((c * v for c, v in zip(coeffs, vals)), ExactReal(0))
    assert qspan_dim(vals + [combo]).dimension == qspan_dim(vals).dimension


@given(st.lists(field_elems(D=3), min_size=1, max_size=5))
def test_relations_annihilate(vals):
    rep = qspan_dim(vals)
    assert rep.dimension == len(vals) - len(rep.relations)
    for rel in rep.relations:
        assert sum((c * v for c, v in zip(rel, vals)), ExactReal(0)) == 0


@given(field_elems(D=5), field_elems(D=5))
def test_commensurable_iff_dim_one(x, y):
    if x.is_zero() or y.is_zero():
        return
    assert (commensurable(x, y) is not None) == (qspan_dim([x, y]).dimension == 1)
