from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatlab.builders import PHI, SQRT2, golden_l, l_origami, octagon, origami, torus
from flatlab.errors import BoundTooLargeForMemory, InsufficientSaddleConnections
from flatlab.exact import ExactReal
from flatlab.sl2 import Mat2
from flatlab.saddles import (
    compare_angle,
    in_thick_part,
    min_virtual_triangle_area,
    saddle_connections,
    systole,
)


def _primitive(L):
    return sorted(
        (p, q)
        for p in range(-L, L + 1)
        for q in range(-L, L + 1)
        if (p, q) != (0, 0) and math.gcd(p, q) == 1 and p * p + q * q <= L * L
    )


def test_torus_holonomies_are_primitive_vectors():
    got = sorted((s.holonomy[0].to_fraction(), s.holonomy[1].to_fraction()) for s in saddle_connections(torus(), 6))
    assert got == _primitive(6)


def test_sorted_by_length_then_angle():
    scs = saddle_connections(octagon(), 3)
    keys = [(s.length_sq, s.angle) for s in scs]
    for (l1, a1), (l2, a2) in zip(keys, keys[1:]):
        assert l1 < l2 or (l1 == l2 and a1 <= a2)


@pytest.mark.parametrize("build", [octagon, golden_l, l_origami])
def test_reverse_connections(build):
    scs = saddle_connections(build(), 3)
    hol = Counter(s.holonomy for s in scs)
    for (x, y), n in hol.items():
        assert hol[(-x, -y)] == n


def test_octagon_shortest():
    scs = saddle_connections(octagon(), 1)
    # the eight sides glue to four saddle connections, each in both orientations
    assert len(scs) == 8
    assert all(s.length_sq == 1 for s in scs)


def test_sectors_cover_cone_angle():
    scs = saddle_connections(octagon(), 2)
    sectors = {s.start_sector for s in scs}
    assert sectors == {0, 1, 2}  # one cone point of angle 6*pi


def test_length_bound_accepts_several_types():
    n = len(saddle_connections(golden_l(), PHI))
    assert n == len(saddle_connections(golden_l(), "1/2+1/2*sqrt(5)"))
    assert n == len(saddle_connections(golden_l(), 1.6180339887498949))


def test_workers_agree():
    M = octagon()
    assert saddle_connections(M, 4) == saddle_connections(M, 4, workers=2)


def test_node_cap():
    with pytest.raises(BoundTooLargeForMemory):
        saddle_connections(octagon(), 20, max_nodes=100)


def test_systole():
    assert systole(torus()) == 1
    assert systole(octagon()) == 1
    assert systole(golden_l()) == PHI - 1
    half = l_origami().apply_matrix(Mat2.diag(Fraction(1, 2), 2))
    assert systole(half) == Fraction(1, 2)


def test_thick_part():
    q = in_thick_part(golden_l(), Fraction(1, 2))
    assert q.member and q.systole_sq == (PHI - 1) ** 2
    assert not in_thick_part(golden_l(), Fraction(7, 10)).member
    assert in_thick_part(octagon(), 1.0).member


def test_virtual_triangles():
    assert min_virtual_triangle_area(torus(), 2) == Fraction(1, 2)
    with pytest.raises(InsufficientSaddleConnections):
        min_virtual_triangle_area(torus(), Fraction(1, 2))
    areas = [min_virtual_triangle_area(octagon(), L) for L in (1, 2, 3, 4)]
    assert all(a >= b for a, b in zip(areas, areas[1:]))
    assert areas[0] == SQRT2 / 4


def test_compare_angle():
    one, zero = ExactReal(1), ExactReal(0)
    assert compare_angle((one, zero), (zero, one)) < 0
    assert compare_angle((zero, -one), (one, one)) > 0
    assert compare_angle((one, one), (one + one, one + one)) == 0


perms = st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))))


@settings(max_examples=25)
@given(perms, st.integers(1, 3))
def test_origami_saddles_are_integral(hv, L):
    h, v = hv
    try:
        M = origami(list(h), list(v))
    except ValueError:
        return
    scs = saddle_connections(M, L)
    for s in scs:
        assert all(c.is_rational() and Fraction(c.to_fraction()).denominator == 1 for c in s.holonomy)
    # square corners are all cone or marked points, so the unit edges are saddle connections
    assert sum(1 for s in scs if s.length_sq == 1) >= 2


@settings(max_examples=15)
@given(st.sampled_from([octagon, golden_l, l_origami]), st.integers(1, 3), st.integers(1, 3))
def test_more_length_finds_more(build, a, b):
    M = build()
    lo, hi = sorted((a, b))
    small, big = saddle_connections(M, lo), saddle_connections(M, hi)
    assert Counter(s.holonomy for s in small) <= Counter(s.holonomy for s in big)
