"""Saddle connections: exact wavefront enumeration, systole, thick part, virtual triangles.

The enumeration unfolds the surface along a triangulation.  Each triangle
corner owns the half-open wedge of directions ``[cw edge, ccw edge)``; the
wedge is pushed across the opposite edge, split at every visible vertex and
narrowed as it goes.  A branch is dropped only when the part of its
crossing edge that is visible inside the wedge lies entirely beyond the
length bound, which is decided exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .errors import BoundTooLargeForMemory, InsufficientSaddleConnections
from .exact import ExactReal, as_exact, exact_sqrt
from .surface import TranslationSurface, cross
from .triangulation import Triangulation, triangulate

DEFAULT_MAX_NODES = 2_000_000


def bound_sq(L) -> ExactReal:
    """Exact square of a length bound given as int, Fraction, float, string or ExactReal."""
    if isinstance(L, float):
        L = Fraction(L)
    L = as_exact(L)
    if L.sign() < 0:
        raise ValueError("length bound must be nonnegative")
    return L * L


@dataclass(frozen=True)
class SaddleConnection:
    """A saddle connection with its holonomy and endpoint data.

    ``start_sector``/``end_sector`` number the 2*pi sheets of the cone angle
    at each endpoint (``0 <= sector < cone_angle_multiple``), counted
    counter-clockwise from a fixed reference horizontal direction.
    """

    holonomy: tuple
    start: int
    start_sector: int
    end: int
    end_sector: int
    length_sq: ExactReal
    start_corner: tuple = field(default=(), compare=False, repr=False)
    end_corner: tuple = field(default=(), compare=False, repr=False)

    @property
    def length(self) -> float:
        return math.sqrt(float(self.length_sq))

    @property
    def angle(self) -> float:
        a = math.atan2(float(self.holonomy[1]), float(self.holonomy[0]))
        return a if a >= 0 else a + 2 * math.pi


def _half(v) -> int:
    y, x = v[1].sign(), v[0].sign()
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def compare_angle(u, v) -> int:
    """Exact comparison of the angles of two nonzero vectors in ``[0, 2*pi)``."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = cross(u, v).sign()
    return -c


def _sc_cmp(a: SaddleConnection, b: SaddleConnection) -> int:
    c = (a.length_sq - b.length_sq).sign()
    if c:
        return c
    c = compare_angle(a.holonomy, b.holonomy)
    if c:
        return c
    ka = (a.start, a.start_sector, a.end, a.end_sector)
    kb = (b.start, b.start_sector, b.end, b.end_sector)
    return (ka > kb) - (ka < kb)


sc_sort_key = cmp_to_key(_sc_cmp)


# -- sectors ----------------------------------------------------------------

_EAST = (ExactReal(1), ExactReal(0))


class SectorIndex:
    """Numbers the 2*pi sheets around every cone point of a triangulation."""

    def __init__(self, T: Triangulation):
        self.T = T
        self._east_rank = {}
        done = set()
        for corner in sorted(T.corners()):
            if corner in done:
                continue
            ring = []
            cur = corner
            while cur not in done:
                done.add(cur)
                ring.append(cur)
                cur = T.corner_ccw(*cur)
            easts = [c for c in ring if T.in_corner(c[0], c[1], _EAST)]
            # rotate so the reference sheet starts at the smallest east corner
            if easts:
                i0 = ring.index(min(easts))
                ring = ring[i0:] + ring[:i0]
            rank = 0
            for c in ring:
                if T.in_corner(c[0], c[1], _EAST):
                    self._east_rank[c] = rank
                    rank += 1

    def sector(self, corner, d) -> int:
        """Sheet containing direction ``d`` issued from ``corner`` (``d`` must lie in that corner)."""
        T = self.T
        t, k = corner
        if corner in self._east_rank:
            cw, _ = T.corner_wedge(t, k)
            if cross(_EAST, d).sign() >= 0:
                return self._east_rank[corner]
            cur = T.corner_cw(t, k)
        else:
            cur = corner
        while cur not in self._east_rank:
            cur = T.corner_cw(*cur)
        return self._east_rank[cur]


# -- enumeration kernel -----------------------------------------------------


def _visible_dist2(A, B, lo, hi):
    """Squared distance from the origin to the part of segment AB inside the closed wedge ``[lo, hi]``."""
    u = (B[0] - A[0], B[1] - A[1])
    s0, s1 = ExactReal(0), ExactReal(1)
    # cross(lo, A + s u) >= 0  and  cross(A + s u, hi) >= 0
    for alpha, beta in (
        (cross(lo, A), cross(lo, u)),
        (cross(A, hi), cross(u, hi)),
    ):
        sb = beta.sign()
        if sb == 0:
            continue
        root = -alpha / beta
        if sb > 0:
            if root > s0:
                s0 = root
        elif root < s1:
            s1 = root
    uu = u[0] * u[0] + u[1] * u[1]
    s = -(A[0] * u[0] + A[1] * u[1]) / uu
    if s < s0:
        s = s0
    elif s > s1:
        s = s1
    X = (A[0] + s * u[0], A[1] + s * u[1])
    return X[0] * X[0] + X[1] * X[1]


def _explore_corner(T: Triangulation, t: int, k: int, L2, cap: int):
    """All saddle connections of squared length <= L2 leaving corner (t, k).

    Returns ``(list of (holonomy, end_corner), nodes visited)``.
    """
    found = []
    e = T.edges[t]
    a = e[k]
    b = (-e[(k + 2) % 3][0], -e[(k + 2) % 3][1])
    if a[0] * a[0] + a[1] * a[1] <= L2:
        found.append((a, T.glue[t][k]))
    stack = [(t, (k + 1) % 3, a, b, a, b)]
    nodes = 0
    edges, glue = T.edges, T.glue
    while stack:
        tt, kk, A, B, lo, hi = stack.pop()
        nodes += 1
        if nodes > cap:
            raise BoundTooLargeForMemory(f"wavefront exceeded {cap} nodes; lower the bound or raise --max-frontier")
        if _visible_dist2(A, B, lo, hi) > L2:
            continue
        t2, j = glue[tt][kk]
        step = edges[t2][(j + 1) % 3]
        R = (A[0] + step[0], A[1] + step[1])
        c_lo = (lo[0] * R[1] - lo[1] * R[0]).sign()
        c_hi = (R[0] * hi[1] - R[1] * hi[0]).sign()
        if c_lo > 0 and c_hi > 0:
            if R[0] * R[0] + R[1] * R[1] <= L2:
                found.append((R, (t2, (j + 2) % 3)))
            stack.append((t2, (j + 1) % 3, A, R, lo, R))
            stack.append((t2, (j + 2) % 3, R, B, R, hi))
        elif c_lo <= 0:
            stack.append((t2, (j + 2) % 3, R, B, lo, hi))
        else:
            stack.append((t2, (j + 1) % 3, A, R, lo, hi))
    return found, nodes


def _explore_many(args):
    T, corners, L2, cap = args
    return [(c, _explore_corner(T, c[0], c[1], L2, cap)) for c in corners]


def saddle_connections(
    M: TranslationSurface,
    L,
    *,
    max_nodes: int = DEFAULT_MAX_NODES,
    workers: int = 1,
    triangulation: Triangulation | None = None,
) -> list[SaddleConnection]:
    """Every saddle connection of length at most ``L``, sorted by length then angle."""
    M.require_exact("saddle_connections()")
    L2 = bound_sq(L)
    T = triangulation if triangulation is not None else triangulate(M)
    sectors = SectorIndex(T)
    corners = sorted(T.corners())
    if workers > 1 and len(corners) > 1:
        chunks = [corners[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_explore_many, [(T, c, L2, max_nodes) for c in chunks]))
        results = [r for part in parts for r in part]
    else:
        results = [(c, _explore_corner(T, c[0], c[1], L2, max_nodes)) for c in corners]
    total = sum(n for _, (_, n) in results)
    if total > max_nodes:
        raise BoundTooLargeForMemory(f"wavefront visited {total} nodes (cap {max_nodes})")
    out = []
    for corner, (found, _) in results:
        p = T.vertex[corner[0]][corner[1]]
        for hol, end_corner in found:
            back = (-hol[0], -hol[1])
            out.append(
                SaddleConnection(
                    holonomy=hol,
                    start=p,
                    start_sector=sectors.sector(corner, hol),
                    end=T.vertex[end_corner[0]][end_corner[1]],
                    end_sector=sectors.sector(end_corner, back),
                    length_sq=hol[0] * hol[0] + hol[1] * hol[1],
                    start_corner=corner,
                    end_corner=end_corner,
                )
            )
    out.sort(key=sc_sort_key)
    return out


# -- systole and thick part -------------------------------------------------


def systole_sq(M: TranslationSurface) -> ExactReal:
    """Squared length of the shortest saddle connection.

    Every triangulation edge is a saddle connection, so the shortest edge
    bounds the systole from above; the search starts a quarter of the way
    there and doubles until something is found.
    """
    M.require_exact("systole()")
    T = triangulate(M)
    edge_min = min(v[0] * v[0] + v[1] * v[1] for v in T.period_vectors())
    L2 = edge_min / 16
    while True:
        if L2 > edge_min:
            L2 = edge_min
        scs = saddle_connections(M, exact_sqrt(L2) or _sqrt_upper(L2), triangulation=T)
        if scs:
            return scs[0].length_sq
        L2 = L2 * 4


def _sqrt_upper(x: ExactReal) -> Fraction:
    """A rational number >= sqrt(x) (and close to it)."""
    f = Fraction(float(x)).limit_denominator(1 << 30)
    r = Fraction(math.sqrt(float(f)) * (1 + 1e-12)).limit_denominator(1 << 30)
    while r * r < x:
        r *= Fraction(1001, 1000)
    return r


def systole(M: TranslationSurface):
    """Length of the shortest saddle connection: exact when quadratic, else a float."""
    s2 = systole_sq(M)
    root = exact_sqrt(s2)
    return root if root is not None else math.sqrt(float(s2))


@dataclass(frozen=True)
class ThickPartQuery:
    epsilon: object
    systole_sq: ExactReal
    member: bool


def in_thick_part(M: TranslationSurface, epsilon) -> ThickPartQuery:
    s2 = systole_sq(M)
    if isinstance(epsilon, float):
        eps2 = Fraction(epsilon) ** 2
    else:
        eps2 = as_exact(epsilon) ** 2
    return ThickPartQuery(epsilon, s2, bool(s2 >= eps2))


# -- virtual triangles ------------------------------------------------------


def min_virtual_triangle_area(M: TranslationSurface, L, scs: Sequence[SaddleConnection] | None = None) -> ExactReal:
    """Minimum of ``|v x w| / 2`` over non-parallel holonomies of length at most ``L``."""
    if scs is None:
        scs = saddle_connections(M, L)
    else:
        L2 = bound_sq(L)
        scs = [s for s in scs if s.length_sq <= L2]
    vecs = {}
    for s in scs:
        vecs[s.holonomy] = None
    vs = list(vecs)
    best = None
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            c = cross(vs[i], vs[j])
            if c.sign() == 0:
                continue
            c = abs(c)
            if best is None or c < best:
                best = c
    if best is None:
        raise InsufficientSaddleConnections("need two non-parallel saddle connections within the bound")
    return best / 2
