"""Cylinder decompositions in exact directions, cylinder shears and stretches.

A direction ``(p, q)`` is first mapped to the positive horizontal ray by the
unimodular field matrix from :func:`direction_normalizer`.  In that frame
every rightward horizontal separatrix is traced through a triangulation; if
they all end at cone points within the length bound, the horizontal saddle
connections cut the surface into cylinders.  Lengths, heights and moduli are
reported in the normalised frame, where the direction vector ``(p, q)`` has
become ``(1, 0)``.  Moduli there differ from Euclidean moduli by the common
factor ``p^2 + q^2`` (see :attr:`Cylinder.true_modulus`), so ratios,
commensurability and Q-span dimension agree in both frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import (
    InvariantViolation,
    NonpositiveFactor,
    NotDecomposed,
    ZeroDirection,
)
from .exact import ExactReal, as_exact
from .saddles import bound_sq
from .sl2 import Mat2
from .surface import Polygon, TranslationSurface
from .triangulation import Triangulation, triangulate

MAX_VERTICAL_STEPS = 1_000_000


def direction_normalizer(p, q) -> Mat2:
    """Determinant-one matrix over the field of ``(p, q)`` sending it to ``(1, 0)``."""
    p, q = as_exact(p), as_exact(q)
    n = p * p + q * q
    if n == 0:
        raise ZeroDirection("direction must be nonzero")
    return Mat2(p / n, q / n, -q, p)


def canonical_direction(v) -> tuple[ExactReal, ExactReal]:
    """Projective representative: ``(1, y/x)`` or ``(0, 1)``."""
    x, y = as_exact(v[0]), as_exact(v[1])
    if x == 0:
        if y == 0:
            raise ZeroDirection("direction must be nonzero")
        return (ExactReal(0), ExactReal(1))
    return (ExactReal(1), y / x)


class Status(str, Enum):
    DECOMPOSED = "Decomposed"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class HorizontalSaddle:
    """A horizontal saddle connection in the normalised frame (oriented east)."""

    index: int
    length: ExactReal
    start: int  # cone point
    end: int
    start_corner: tuple = field(compare=False, repr=False, default=())
    end_corner: tuple = field(compare=False, repr=False, default=())

    @property
    def holonomy(self):
        return (self.length, ExactReal(0))


@dataclass(frozen=True)
class Cylinder:
    circumference: ExactReal
    height: ExactReal
    modulus: ExactReal
    bottom: tuple[int, ...]  # horizontal saddle indices, west to east
    top: tuple[int, ...]
    core_direction: tuple
    twist: ExactReal = field(default=ExactReal(0), repr=False)

    @property
    def area(self) -> ExactReal:
        return self.circumference * self.height

    @property
    def true_modulus(self) -> ExactReal:
        p, q = self.core_direction
        return self.modulus / (p * p + q * q)

    @property
    def core_holonomy(self):
        p, q = self.core_direction
        return (self.circumference * p, self.circumference * q)


@dataclass(frozen=True)
class CylinderDecomposition:
    direction: tuple
    status: Status
    cylinders: tuple[Cylinder, ...] = ()
    saddles: tuple[HorizontalSaddle, ...] = ()
    bound: object = None
    normalizer: Mat2 | None = field(default=None, compare=False, repr=False)

    @property
    def decomposed(self) -> bool:
        return self.status is Status.DECOMPOSED

    @property
    def moduli(self) -> list[ExactReal]:
        return [c.modulus for c in self.cylinders]

    def saddle_length_ratio(self) -> ExactReal | None:
        if not self.saddles:
            return None
        lengths = [s.length for s in self.saddles]
        return max(lengths) / min(lengths)


# -- horizontal tracing -----------------------------------------------------


@dataclass
class _Chord:
    saddle: int
    y: ExactReal
    x_start: ExactReal  # local x of the saddle's starting point
    x_lo: ExactReal
    x_hi: ExactReal


def _transfer(T: Triangulation, t: int, k: int):
    """Neighbour across edge (t, k) and the translation from t's frame to its frame."""
    t2, k2 = T.glue[t][k]
    P = T.positions(t)
    Q = T.positions(t2)
    # corner k of t sits at corner k2 + 1 of t2
    src = P[k]
    dst = Q[(k2 + 1) % 3]
    return t2, k2, (dst[0] - src[0], dst[1] - src[1])


def _trace_east(T: Triangulation, corner, B2, chords, sid):
    """Follow the rightward horizontal separatrix leaving ``corner``.

    Registers chords and returns ``(length, end_corner)`` or ``None`` when
    the length bound (squared, ``B2``) is exceeded first.
    """
    t, k = corner
    P = T.positions(t)
    V = P[k]
    e = T.edges[t][k]
    if e[1] == 0 and e[0] > 0:
        end = P[(k + 1) % 3]
        chords.setdefault(t, []).append(_Chord(sid, V[1], V[0], V[0], end[0]))
        t2, k2, tau = _transfer(T, t, k)
        Q = T.positions(t2)
        a, b = Q[(k2 + 1) % 3], Q[k2]
        chords.setdefault(t2, []).append(_Chord(sid, a[1], a[0], a[0], b[0]))
        length = e[0]
        if length * length > B2:
            return None
        return length, T.glue[t][k]
    y = V[1]
    x_start = V[0]
    x_in = V[0]
    # leave through the opposite edge (k+1)
    k_exit = (k + 1) % 3
    while True:
        A, Bv = P[k_exit], P[(k_exit + 1) % 3]
        x_out = A[0] + (y - A[1]) * (Bv[0] - A[0]) / (Bv[1] - A[1])
        chords.setdefault(t, []).append(_Chord(sid, y, x_start, x_in, x_out))
        if (x_out - x_start) ** 2 > B2:
            return None
        t, k_in, tau = _transfer(T, t, k_exit)
        P = T.positions(t)
        y = y + tau[1]
        x_start = x_start + tau[0]
        x_in = x_out + tau[0]
        far = P[(k_in + 2) % 3]
        if far[1] == y:
            chords.setdefault(t, []).append(_Chord(sid, y, x_start, x_in, far[0]))
            length = far[0] - x_start
            if length * length > B2:
                return None
            return length, (t, (k_in + 2) % 3)
        k_exit = (k_in + 1) % 3 if far[1] > y else (k_in + 2) % 3


def _rotate_to_east(T: Triangulation, corner, clockwise: bool):
    east = (ExactReal(1), ExactReal(0))
    cur = T.corner_cw(*corner) if clockwise else T.corner_ccw(*corner)
    while not T.in_corner(cur[0], cur[1], east):
        cur = T.corner_cw(*cur) if clockwise else T.corner_ccw(*cur)
    return cur


def _top_exit(P, x):
    """Edge through which the upward ray at ``x+`` leaves a triangle, and its height there."""
    for k in range(3):
        A, B = P[k], P[(k + 1) % 3]
        if B[0] < A[0] and B[0] <= x < A[0]:
            return k, A[1] + (x - A[0]) * (B[1] - A[1]) / (B[0] - A[0])
    raise InvariantViolation("vertical ray lost inside a triangle")


def _trace_up(T: Triangulation, chords, t: int, x, y0):
    """Shoot the vertical ray through ``(x+, y0)`` upward; return ``(chord, height, x_local)``."""
    y_cur, y_base = y0, y0
    first = True
    for _ in range(MAX_VERTICAL_STEPS):
        best = None
        for ch in chords.get(t, ()):
            # past the first triangle a chord at the entry height starts at the
            # vertex the ray just grazed, so it lies above the ray's x+ side
            above = ch.y > y_cur if first else ch.y >= y_cur
            if above and ch.x_lo <= x < ch.x_hi:
                if best is None or ch.y < best.y:
                    best = ch
        if best is not None:
            return best, best.y - y_base, x
        k, y_exit = _top_exit(T.positions(t), x)
        t, _, tau = _transfer(T, t, k)
        x = x + tau[0]
        y_cur = y_exit + tau[1]
        y_base = y_base + tau[1]
        first = False
    raise InvariantViolation("vertical ray did not reach the top of its cylinder")


# -- decomposition ----------------------------------------------------------


def decompose(M: TranslationSurface, direction=(1, 0), bound=None) -> CylinderDecomposition:
    """Cylinder decomposition of ``M`` in the exact direction ``(p, q)``.

    ``bound`` caps the (original-frame) length of each traced separatrix; the
    default is twenty times the sum of polygon diameters.  Exceeding it gives
    an ``Undecided`` result, not an error.
    """
    M.require_exact("decompose()")
    p, q = as_exact(direction[0]), as_exact(direction[1])
    N = direction_normalizer(p, q)
    if bound is None:
        bound = default_bound(M)
    if not isinstance(bound, float):
        bound = as_exact(bound)
    B2 = bound_sq(bound) / (p * p + q * q)
    Mn = M.apply_matrix(N)
    T = triangulate(Mn)
    east = (ExactReal(1), ExactReal(0))
    chords: dict[int, list[_Chord]] = {}
    saddles: list[HorizontalSaddle] = []
    for corner in sorted(T.corners()):
        if not T.in_corner(corner[0], corner[1], east):
            continue
        sid = len(saddles)
        res = _trace_east(T, corner, B2, chords, sid)
        if res is None:
            return CylinderDecomposition((p, q), Status.UNDECIDED, bound=bound, normalizer=N)
        length, end_corner = res
        saddles.append(
            HorizontalSaddle(sid, length, T.vertex[corner[0]][corner[1]], T.vertex[end_corner[0]][end_corner[1]], corner, end_corner)
        )
    by_start = {s.start_corner: s.index for s in saddles}
    bottom_next = {s.index: by_start[_rotate_to_east(T, s.end_corner, True)] for s in saddles}
    top_next = {s.index: by_start[_rotate_to_east(T, s.end_corner, False)] for s in saddles}
    cylinders = []
    seen = set()
    for s in saddles:
        if s.index in seen:
            continue
        bottom = _cycle(bottom_next, s.index)
        seen.update(bottom)
        circ = sum((saddles[i].length for i in bottom), ExactReal(0))
        # vertical ray from the midpoint of the first bottom saddle
        first = bottom[0]
        mid = saddles[first].length / 2
        t0, c0 = _start_chord(T, chords, first, mid)
        hit, height, x_local = _trace_up(T, chords, t0, c0.x_start + mid, c0.y)
        top = _cycle(top_next, hit.saddle)
        top_circ = sum((saddles[i].length for i in top), ExactReal(0))
        if top_circ != circ:
            raise InvariantViolation("cylinder top and bottom lengths disagree")
        offset_top = x_local - hit.x_start
        twist = mid - offset_top  # x-position of the first top saddle's start above the first bottom start
        cylinders.append(Cylinder(circ, height, height / circ, tuple(bottom), tuple(top), (p, q), twist))
    total = sum((c.area for c in cylinders), ExactReal(0))
    if total != M.area():
        raise InvariantViolation(f"cylinder areas sum to {total}, surface area is {M.area()}")
    cylinders.sort(key=lambda c: (c.height, c.circumference, c.bottom))
    dec = CylinderDecomposition((p, q), Status.DECOMPOSED, tuple(cylinders), tuple(saddles), bound, N)
    return dec


def _start_chord(T: Triangulation, chords, sid, offset):
    """Triangle and chord of saddle ``sid`` at ``start + offset``, in the triangle lying above it."""
    for t in sorted(chords):
        for ch in chords[t]:
            x = ch.x_start + offset
            if ch.saddle == sid and ch.x_lo <= x < ch.x_hi:
                k, y_top = _top_exit(P := T.positions(t), x)
                # ties are broken on the x+ side: a rising top edge clears the chord
                if y_top > ch.y or (y_top == ch.y and P[(k + 1) % 3][1] < P[k][1]):
                    return t, ch
    raise InvariantViolation("midpoint of a horizontal saddle connection not found")


def _cycle(perm, start) -> list[int]:
    out = [start]
    cur = perm[start]
    while cur != start:
        out.append(cur)
        cur = perm[cur]
    return out


def default_bound(M: TranslationSurface):
    """Twenty times the sum of polygon diameters (an upper bound for the surface diameter)."""
    total = 0.0
    for poly in M.polygons:
        vs = poly.vertices
        d = max(
            (float(a[0] - b[0]) ** 2 + float(a[1] - b[1]) ** 2) for a in vs for b in vs
        )
        total += math.sqrt(d)
    return ExactReal(math.ceil(20 * total))


# -- reassembly and deformations -------------------------------------------


def _cylinder_triangles(cyl: Cylinder, saddles: Sequence[HorizontalSaddle], shift: ExactReal, stretch: ExactReal):
    """Triangles of one cylinder (normalised frame) and the slots of its boundary edges."""
    h = cyl.height * stretch
    bx = [ExactReal(0)]
    for i in cyl.bottom:
        bx.append(bx[-1] + saddles[i].length)
    x0 = cyl.twist + shift
    tx = [x0]
    for i in cyl.top:
        tx.append(tx[-1] + saddles[i].length)
    zero = ExactReal(0)
    tris = []  # each: (vertices, edge tags); tags: ("bottom", saddle) / ("top", saddle) / ("diag", n) / ("side", "L"/"R")
    i = j = 0
    m, n = len(cyl.bottom), len(cyl.top)
    diag = 0
    prev_diag = ("side", "L")
    while i < m or j < n:
        advance_bottom = j == n or (i < m and bx[i + 1] - bx[0] <= tx[j + 1] - tx[0])
        last = (i + (1 if advance_bottom else 0)) == m and (j + (0 if advance_bottom else 1)) == n
        next_diag = ("side", "R") if last else ("diag", diag)
        if advance_bottom:
            verts = ((bx[i], zero), (bx[i + 1], zero), (tx[j], h))
            tags = (("bottom", cyl.bottom[i]), next_diag, prev_diag)
            i += 1
        else:
            verts = ((bx[i], zero), (tx[j + 1], h), (tx[j], h))
            tags = (next_diag, ("top", cyl.top[j]), prev_diag)
            j += 1
        tris.append((verts, tags))
        prev_diag = next_diag
        diag += 1
    return tris


def reassemble(
    M: TranslationSurface,
    decomposition: CylinderDecomposition,
    shifts: dict[int, ExactReal] | None = None,
    stretches: dict[int, ExactReal] | None = None,
) -> TranslationSurface:
    """Rebuild a surface from its cylinders, optionally sheared/stretched, in the original frame."""
    if not decomposition.decomposed:
        raise NotDecomposed("the direction is not (yet) certified periodic")
    shifts = shifts or {}
    stretches = stretches or {}
    saddles = decomposition.saddles
    polys = []
    slot_of = {}
    glue = {}
    for ci, cyl in enumerate(decomposition.cylinders):
        tris = _cylinder_triangles(cyl, saddles, as_exact(shifts.get(ci, 0)), as_exact(stretches.get(ci, 1)))
        first = len(polys)
        for ti, (verts, tags) in enumerate(tris):
            pi = len(polys)
            polys.append(Polygon(f"C{ci}_{ti}", verts))
            for k, tag in enumerate(tags):
                if tag[0] in ("bottom", "top"):
                    slot_of[(tag[0], tag[1])] = (pi, k)
                elif tag[0] == "side":
                    slot_of[("side", ci, tag[1])] = (pi, k)
                else:
                    slot_of.setdefault(("diag", ci, tag[1]), []).append((pi, k))
        del first
    for key, val in slot_of.items():
        if key[0] == "diag":
            a, b = val
            glue[a] = b
            glue[b] = a
        elif key[0] == "bottom":
            a, b = val, slot_of[("top", key[1])]
            glue[a] = b
            glue[b] = a
        elif key[0] == "side" and key[2] == "L":
            a, b = val, slot_of[("side", key[1], "R")]
            glue[a] = b
            glue[b] = a
    S = TranslationSurface(polys, glue)
    return S.apply_matrix(decomposition.normalizer.inverse())


def _subset(decomposition: CylinderDecomposition, subset: Iterable[int] | None) -> list[int]:
    if not decomposition.decomposed:
        raise NotDecomposed("the direction is not (yet) certified periodic")
    idx = list(range(len(decomposition.cylinders))) if subset is None else sorted(set(subset))
    if not idx:
        raise ValueError("subset must be nonempty")
    for i in idx:
        if not 0 <= i < len(decomposition.cylinders):
            raise IndexError(f"no cylinder {i}")
    return idx


def shear_cylinders(M: TranslationSurface, decomposition: CylinderDecomposition, subset: Iterable[int] | None, t) -> TranslationSurface:
    """Apply ``h_t`` (in the normalised frame) to the chosen cylinders and leave the rest alone."""
    idx = _subset(decomposition, subset)
    t = as_exact(t)
    shifts = {i: t * decomposition.cylinders[i].height for i in idx}
    return reassemble(M, decomposition, shifts=shifts)


def stretch_cylinders(M: TranslationSurface, decomposition: CylinderDecomposition, subset: Iterable[int] | None, factor) -> TranslationSurface:
    """Apply ``diag(1, factor)`` (in the normalised frame) to the chosen cylinders."""
    idx = _subset(decomposition, subset)
    factor = as_exact(factor)
    if factor.sign() <= 0:
        raise NonpositiveFactor("stretch factor must be positive")
    return reassemble(M, decomposition, stretches={i: factor for i in idx})
