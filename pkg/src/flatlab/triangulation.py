"""Triangulated translation surfaces, Delaunay flips and canonical codes.

A :class:`Triangulation` stores for every triangle its three edge vectors
(counter-clockwise, summing to zero), the gluing of its edge slots and the
cone point sitting at each corner.  Corner ``k`` of a triangle is the start
of edge ``k``.  All arrays are plain lists; a triangulation is treated as a
value and every mutating helper works on a copy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FieldMismatch, FloatModeUnsupported, InvariantViolation
from .exact import ExactReal
from .surface import Polygon, TranslationSurface, add, cross, in_wedge, neg, sub

Slot = tuple[int, int]


@dataclass
class Triangulation:
    edges: list  # edges[t] = [v0, v1, v2]
    glue: list  # glue[t][k] = (t2, k2)
    vertex: list  # vertex[t][k] = cone point index at corner k
    num_cone_points: int
    delaunay_flag: bool = False
    cone_orders: tuple = field(default=())

    # -- navigation ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.edges)

    def neighbor(self, t: int, k: int) -> Slot:
        return self.glue[t][k]

    def corner_cw(self, t: int, k: int) -> Slot:
        t2, k2 = self.glue[t][k]
        return (t2, (k2 + 1) % 3)

    def corner_ccw(self, t: int, k: int) -> Slot:
        return self.glue[t][(k + 2) % 3]

    def corner_wedge(self, t: int, k: int):
        e = self.edges[t]
        return e[k], neg(e[(k + 2) % 3])

    def in_corner(self, t: int, k: int, d) -> bool:
        cw, ccw = self.corner_wedge(t, k)
        return in_wedge(cw, ccw, d)

    def positions(self, t: int):
        """Corner positions in the triangle's local frame (corner 0 at the origin)."""
        e = self.edges[t]
        z = e[0][0] * 0
        p0 = (z, z)
        p1 = e[0]
        return (p0, p1, add(p1, e[1]))

    def corners(self):
        for t in range(len(self.edges)):
            for k in range(3):
                yield (t, k)

    def slots(self):
        """One representative slot per glued edge pair."""
        for t in range(len(self.edges)):
            for k in range(3):
                if (t, k) < self.glue[t][k]:
                    yield (t, k)

    def copy(self) -> Triangulation:
        return Triangulation(
            [list(e) for e in self.edges],
            [list(g) for g in self.glue],
            [list(v) for v in self.vertex],
            self.num_cone_points,
            self.delaunay_flag,
            self.cone_orders,
        )

    # -- checks -------------------------------------------------------------

    def check(self) -> None:
        for t, e in enumerate(self.edges):
            s = add(add(e[0], e[1]), e[2])
            if s[0] != 0 or s[1] != 0:
                raise InvariantViolation(f"triangle {t} does not close up")
            if cross(e[0], e[1]) <= 0:
                raise InvariantViolation(f"triangle {t} is degenerate or clockwise")
            for k in range(3):
                t2, k2 = self.glue[t][k]
                if self.glue[t2][k2] != (t, k):
                    raise InvariantViolation("edge gluing is not an involution")
                v = self.edges[t2][k2]
                if e[k][0] + v[0] != 0 or e[k][1] + v[1] != 0:
                    raise InvariantViolation("glued edges are not opposite")

    # -- flips --------------------------------------------------------------

    def incircle(self, t: int, k: int):
        """Sign of the in-circle determinant across edge ``(t, k)``.

        Positive when the far vertex of the neighbouring triangle lies
        strictly inside the circumcircle of ``t``.
        """
        e = self.edges[t]
        t2, k2 = self.glue[t][k]
        p1 = e[k]
        p2 = add(p1, e[(k + 1) % 3])
        p3 = self.edges[t2][(k2 + 1) % 3]  # from the shared start corner into the far vertex
        rows = []
        for p in ((p1[0] * 0, p1[1] * 0), p1, p2):
            x, y = sub(p, p3)
            rows.append((x, y, x * x + y * y))
        (ax, ay, aw), (bx, by, bw), (cx, cy, cw) = rows
        det = ax * (by * cw - bw * cy) - ay * (bx * cw - bw * cx) + aw * (bx * cy - by * cx)
        return det.sign() if isinstance(det, ExactReal) else (det > 0) - (det < 0)

    def flip(self, t: int, k: int) -> None:
        """Flip edge ``(t, k)`` in place.  The quadrilateral must be strictly convex."""
        t2, k2 = self.glue[t][k]
        if t2 == t:
            raise InvariantViolation("cannot flip an edge glued to its own triangle")
        e, f = self.edges[t], self.edges[t2]
        b, c = e[(k + 1) % 3], e[(k + 2) % 3]
        b2, c2 = f[(k2 + 1) % 3], f[(k2 + 2) % 3]
        v, w = self.vertex[t], self.vertex[t2]
        P0, P1, P2 = v[k], v[(k + 1) % 3], v[(k + 2) % 3]
        P3 = w[(k2 + 2) % 3]
        d = neg(add(c, b2))
        if cross(c, b2) <= 0 or cross(c2, b) <= 0:
            raise InvariantViolation("flip would create a degenerate triangle")
        moved = {
            (t, (k + 2) % 3): (t, 0),
            (t2, (k2 + 1) % 3): (t, 1),
            (t2, (k2 + 2) % 3): (t2, 0),
            (t, (k + 1) % 3): (t2, 1),
        }
        old = {s: self.glue[s[0]][s[1]] for s in moved}
        self.edges[t] = [c, b2, d]
        self.edges[t2] = [c2, b, neg(d)]
        self.vertex[t] = [P2, P0, P3]
        self.vertex[t2] = [P3, P1, P2]
        self.glue[t][2] = (t2, 2)
        self.glue[t2][2] = (t, 2)
        for s, new in moved.items():
            partner = old[s]
            partner = moved.get(partner, partner)
            self.glue[new[0]][new[1]] = partner
            self.glue[partner[0]][partner[1]] = new

    def make_delaunay(self, max_flips: int = 1_000_000) -> int:
        """Flip until every edge passes the empty-circumdisk test.  Returns the flip count."""
        flips = 0
        stack = list(self.slots())
        while stack:
            t, k = stack.pop()
            if self.incircle(t, k) > 0:
                t2, _ = self.glue[t][k]
                self.flip(t, k)
                flips += 1
                if flips > max_flips:
                    raise InvariantViolation("Delaunay flip algorithm did not terminate")
                for tt in (t, t2):
                    for kk in range(3):
                        stack.append((tt, kk))
        self.delaunay_flag = True
        return flips

    def is_delaunay(self) -> bool:
        return all(self.incircle(t, k) <= 0 for t, k in self.slots())

    # -- conversion ---------------------------------------------------------

    def to_surface(self, prefix: str = "T") -> TranslationSurface:
        polys = []
        for t in range(len(self.edges)):
            p0, p1, p2 = self.positions(t)
            polys.append(Polygon(f"{prefix}{t}", (p0, p1, p2)))
        glue = {(t, k): self.glue[t][k] for t in range(len(self.edges)) for k in range(3)}
        return TranslationSurface(polys, glue)

    def period_vectors(self) -> list:
        """Holonomies of one edge from each glued pair (fixed marking order)."""
        return [self.edges[t][k] for t, k in self.slots()]


def triangulate(M: TranslationSurface) -> Triangulation:
    """Fan-triangulate every polygon from its vertex 0."""
    edges, glue, vertex = [], [], []
    slot_of = {}  # polygon edge -> triangle slot
    corner_cp = {}
    for cp in M.cone_points:
        for corner in cp.vertex_class:
            corner_cp[corner] = cp.index
    for pi, poly in enumerate(M.polygons):
        n = len(poly)
        vs = poly.vertices
        base = len(edges)
        for i in range(1, n - 1):
            t = len(edges)
            edges.append([sub(vs[i], vs[0]), sub(vs[i + 1], vs[i]), sub(vs[0], vs[i + 1])])
            vertex.append([corner_cp[(pi, 0)], corner_cp[(pi, i)], corner_cp[(pi, i + 1)]])
            glue.append([None, None, None])
            slot_of[(pi, i)] = (t, 1)
            if i == 1:
                slot_of[(pi, 0)] = (t, 0)
            else:
                glue[t][0] = (t - 1, 2)
                glue[t - 1][2] = (t, 0)
            if i == n - 2:
                slot_of[(pi, n - 1)] = (t, 2)
        assert len(edges) - base == n - 2
    for e, f in M.gluings.items():
        t, k = slot_of[e]
        glue[t][k] = slot_of[f]
    orders = tuple(cp.order for cp in M.cone_points)
    return Triangulation(edges, glue, vertex, len(M.cone_points), False, orders)


def delaunay(M: TranslationSurface) -> Triangulation:
    """Delaunay triangulation of ``M`` (vertex set: all cone points, marked ones included)."""
    if M.float_mode:
        raise FloatModeUnsupported("delaunay() needs an exact-mode surface")
    T = triangulate(M)
    T.make_delaunay()
    return T


# -- Delaunay cells and canonical codes -------------------------------------


@dataclass(frozen=True)
class Cell:
    boundary: tuple  # triangle slots along the cell boundary, counter-clockwise
    vectors: tuple  # edge vectors of those slots


def delaunay_cells(T: Triangulation) -> list[Cell]:
    """Merge Delaunay triangles across cocircular edges into convex cells."""
    parent = list(range(len(T.edges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    internal = set()
    for t, k in T.slots():
        if T.incircle(t, k) == 0:
            t2, k2 = T.glue[t][k]
            internal.add((t, k))
            internal.add((t2, k2))
            parent[find(t)] = find(t2)
    done = set()
    cells = []
    for t in range(len(T.edges)):
        for k in range(3):
            if (t, k) in internal or (t, k) in done:
                continue
            # walk the boundary of the cell containing slot (t, k)
            loop = []
            cur = (t, k)
            while cur not in done:
                done.add(cur)
                loop.append(cur)
                tt, kk = cur
                nxt = (tt, (kk + 1) % 3)
                while nxt in internal:
                    t2, k2 = T.glue[nxt[0]][nxt[1]]
                    nxt = (t2, (k2 + 1) % 3)
                cur = nxt
            if cur != loop[0]:
                raise InvariantViolation("Delaunay cell boundary did not close")
            cells.append(Cell(tuple(loop), tuple(T.edges[s[0]][s[1]] for s in loop)))
    return cells


def _vec_key(v):
    return (v[0], v[1])


def canonical_code(T: Triangulation) -> tuple:
    """Lexicographically minimal breadth-first code of the Delaunay cell complex.

    Only starting flags whose edge vector is the minimum (x, then y) over all
    cell edges are tried; that set is itself translation-invariant.
    """
    cells = delaunay_cells(T)
    where = {}
    for ci, cell in enumerate(cells):
        for pos, s in enumerate(cell.boundary):
            where[s] = (ci, pos)
    all_vecs = [v for cell in cells for v in cell.vectors]
    vmin = min(all_vecs, key=_vec_key)
    starts = [(ci, pos) for ci, cell in enumerate(cells) for pos, v in enumerate(cell.vectors) if v[0] == vmin[0] and v[1] == vmin[1]]
    best = None
    for ci0, pos0 in starts:
        label = {ci0: 0}
        rot = {ci0: pos0}
        order = [ci0]
        code = []
        i = 0
        while i < len(order):
            ci = order[i]
            cell = cells[ci]
            n = len(cell.boundary)
            entry = [n]
            for j in range(n):
                pos = (rot[ci] + j) % n
                s = cell.boundary[pos]
                other = T.glue[s[0]][s[1]]
                cj, pj = where[other]
                if cj not in label:
                    label[cj] = len(order)
                    rot[cj] = pj
                    order.append(cj)
                m = len(cells[cj].boundary)
                v = cell.vectors[pos]
                entry.append((v[0], v[1], label[cj], (pj - rot[cj]) % m))
            code.append(tuple(entry))
            i += 1
        code = tuple(code)
        if best is None or code < best:
            best = code
    return best


def equivalent(M1: TranslationSurface, M2: TranslationSurface) -> bool:
    """Decide translation equivalence of two exact-mode surfaces."""
    M1.require_exact("equivalent()")
    M2.require_exact("equivalent()")
    if M1.field_D and M2.field_D and M1.field_D != M2.field_D:
        raise FieldMismatch(f"surfaces over Q(sqrt({M1.field_D})) and Q(sqrt({M2.field_D}))")
    if len(M1.cone_points) != len(M2.cone_points):
        return False
    if M1.stratum_signature() != M2.stratum_signature():
        return False
    if M1.area() != M2.area():
        return False
    return canonical_code(delaunay(M1)) == canonical_code(delaunay(M2))
