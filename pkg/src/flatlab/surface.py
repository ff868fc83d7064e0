"""Translation surfaces presented as convex polygons glued by translations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    FieldMismatch,
    FloatModeUnsupported,
    GluingMismatch,
    InvariantViolation,
    MixedFieldError,
    NonConvexPolygon,
    SingularMatrix,
)
from .exact import ExactReal, as_exact, common_field
from .sl2 import Mat2

Edge = tuple[int, int]  # (polygon index, edge index); edge i runs from vertex i to i+1

_FLOAT_TOL = 1e-9


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def neg(u):
    return (-u[0], -u[1])


@dataclass(frozen=True)
class Polygon:
    name: str
    vertices: tuple

    def __len__(self) -> int:
        return len(self.vertices)

    def edge(self, i: int):
        n = len(self.vertices)
        return sub(self.vertices[(i + 1) % n], self.vertices[i % n])

    def edges(self) -> list:
        return [self.edge(i) for i in range(len(self.vertices))]

    def signed_area2(self):
        vs = self.vertices
        n = len(vs)
        total = cross(vs[n - 1], vs[0])
        for i in range(n - 1):
            total = total + cross(vs[i], vs[i + 1])
        return total


@dataclass(frozen=True)
class ConePoint:
    """A vertex class.  Its cone angle is ``2*pi*cone_angle_multiple``."""

    index: int
    vertex_class: frozenset
    cone_angle_multiple: int

    @property
    def order(self) -> int:
        return self.cone_angle_multiple - 1


@dataclass(frozen=True)
class Stratum:
    orders: tuple[int, ...]  # positive orders, descending
    marked_points: int  # cone points of order 0

    def __str__(self) -> str:
        inner = ", ".join(map(str, self.orders))
        return f"H({inner})" + (f" + {self.marked_points} marked" if self.marked_points else "")


def _sign(x) -> int:
    if isinstance(x, ExactReal):
        return x.sign()
    if abs(x) <= _FLOAT_TOL:
        return 0
    return 1 if x > 0 else -1


def in_wedge(cw, ccw, d) -> bool:
    """Is ``d`` in the half-open wedge ``[cw, ccw)`` (measured counter-clockwise)?

    The wedge must be narrower than a half-turn.
    """
    return _sign(cross(cw, d)) >= 0 and _sign(cross(d, ccw)) > 0


EAST = (ExactReal(1), ExactReal(0))


class TranslationSurface:
    """Immutable translation surface.

    ``gluings`` maps every edge ``(p, i)`` to its partner.  In exact mode the
    glued edge vectors are exact negatives of each other; in float mode they
    agree to ``1e-9``.
    """

    def __init__(self, polygons: Sequence[Polygon], gluings: Mapping[Edge, Edge], *, float_mode: bool | None = None):
        self.polygons = tuple(polygons)
        self._glue = dict(gluings)
        coords = [c for p in self.polygons for v in p.vertices for c in v]
        if float_mode is None:
            float_mode = not all(isinstance(c, ExactReal) for c in coords)
        self.float_mode = float_mode
        if float_mode:
            self.polygons = tuple(
                Polygon(p.name, tuple((float(x), float(y)) for x, y in p.vertices)) for p in self.polygons
            )
            self.field_D = 0
        else:
            try:
                self.field_D = common_field(coords)
            except MixedFieldError as exc:
                raise FieldMismatch(str(exc)) from None
        self._validate()
        self.cone_points = self._compute_cone_points()

    # -- construction checks ------------------------------------------------

    def _validate(self) -> None:
        if not self.polygons:
            raise InvariantViolation("a surface needs at least one polygon")
        names = [p.name for p in self.polygons]
        if len(set(names)) != len(names):
            raise InvariantViolation("polygon names must be unique")
        for pi, poly in enumerate(self.polygons):
            n = len(poly)
            if n < 3:
                raise NonConvexPolygon(f"polygon {poly.name} has fewer than 3 vertices")
            es = poly.edges()
            for i in range(n):
                if _sign(cross(es[i], es[(i + 1) % n])) <= 0:
                    raise NonConvexPolygon(
                        f"polygon {poly.name} is not strictly convex and counter-clockwise at vertex {(i + 1) % n}"
                    )
            if _sign(poly.signed_area2()) <= 0:
                raise NonConvexPolygon(f"polygon {poly.name} is not positively oriented")
            # strictly convex turning with total turn 2*pi: winding number 1
            turns = sum(1 for i in range(n) if in_wedge(es[i], es[(i + 1) % n], EAST if not self.float_mode else (1.0, 0.0)))
            if turns != 1:
                raise NonConvexPolygon(f"polygon {poly.name} winds more than once")
        all_edges = {(pi, i) for pi, p in enumerate(self.polygons) for i in range(len(p))}
        if set(self._glue) != all_edges:
            missing = sorted(all_edges - set(self._glue))
            extra = sorted(set(self._glue) - all_edges)
            raise GluingMismatch(f"gluing does not cover every edge exactly (missing {missing}, unknown {extra})")
        for e, f in self._glue.items():
            if e == f:
                raise GluingMismatch(f"edge {self.edge_label(e)} is glued to itself")
            if self._glue.get(f) != e:
                raise GluingMismatch(f"gluing is not an involution at {self.edge_label(e)}")
            u, v = self.edge_vector(e), self.edge_vector(f)
            if self.float_mode:
                if abs(u[0] + v[0]) > _FLOAT_TOL * (1 + abs(u[0])) or abs(u[1] + v[1]) > _FLOAT_TOL * (1 + abs(u[1])):
                    raise GluingMismatch(f"edges {self.edge_label(e)} and {self.edge_label(f)} are not opposite")
            elif u[0] + v[0] != 0 or u[1] + v[1] != 0:
                raise GluingMismatch(
                    f"edges {self.edge_label(e)} = ({u[0]}, {u[1]}) and {self.edge_label(f)} = ({v[0]}, {v[1]}) are not opposite"
                )
        if self.float_mode:
            return
        if self.area() <= 0:
            raise InvariantViolation("total area must be positive")

    def _compute_cone_points(self) -> tuple[ConePoint, ...]:
        seen: set[tuple[int, int]] = set()
        classes = []
        east = (1.0, 0.0) if self.float_mode else EAST
        for pi, poly in enumerate(self.polygons):
            for vi in range(len(poly)):
                if (pi, vi) in seen:
                    continue
                orbit = []
                m = 0
                cur = (pi, vi)
                while cur not in seen:
                    seen.add(cur)
                    orbit.append(cur)
                    p, v = cur
                    P = self.polygons[p]
                    cw = P.edge(v)
                    ccw = neg(P.edge(v - 1))
                    if in_wedge(cw, ccw, east):
                        m += 1
                    cur = self.ccw_corner(cur)
                classes.append((orbit, m))
        for orbit, m in classes:
            if m < 1:
                raise InvariantViolation(f"vertex class at {orbit[0]} has no full turn of angle")
        return tuple(ConePoint(i, frozenset(orbit), m) for i, (orbit, m) in enumerate(classes))

    # -- combinatorics ------------------------------------------------------

    @property
    def gluings(self) -> dict:
        return dict(self._glue)

    def partner(self, e: Edge) -> Edge:
        return self._glue[e]

    def edge_vector(self, e: Edge):
        return self.polygons[e[0]].edge(e[1])

    def edge_label(self, e: Edge) -> str:
        return f"{self.polygons[e[0]].name}.{e[1]}"

    def ccw_corner(self, corner: tuple[int, int]) -> tuple[int, int]:
        """The next polygon corner counter-clockwise around the same vertex."""
        p, v = corner
        n = len(self.polygons[p])
        return self.partner((p, (v - 1) % n))

    def cone_point_of(self, corner: tuple[int, int]) -> ConePoint:
        for cp in self.cone_points:
            if corner in cp.vertex_class:
                return cp
        raise KeyError(corner)

    def num_edges(self) -> int:
        return sum(len(p) for p in self.polygons) // 2

    def euler_characteristic(self) -> int:
        return len(self.cone_points) - self.num_edges() + len(self.polygons)

    def genus(self) -> int:
        chi = self.euler_characteristic()
        if chi % 2:
            raise InvariantViolation("odd Euler characteristic")
        return (2 - chi) // 2

    def stratum_signature(self) -> Stratum:
        orders = sorted((c.order for c in self.cone_points if c.order > 0), reverse=True)
        marked = sum(1 for c in self.cone_points if c.order == 0)
        return Stratum(tuple(orders), marked)

    def gauss_bonnet_ok(self) -> bool:
        return sum(c.order for c in self.cone_points) == 2 * self.genus() - 2

    # -- metric -------------------------------------------------------------

    def area(self):
        total = None
        for p in self.polygons:
            a = p.signed_area2()
            total = a if total is None else total + a
        return total / 2

    def apply_matrix(self, A: Mat2) -> TranslationSurface:
        det = A.det()
        if det == 0:
            raise SingularMatrix("cannot act by a singular matrix")
        exact = A.exact and not self.float_mode
        M = A if exact else A.as_float()
        polys = []
        for p in self.polygons:
            vs = [M.apply(v) for v in p.vertices]
            polys.append(vs)
        glue = dict(self._glue)
        if (det < 0) if exact else (float(det) < 0):
            # orientation reversal: reverse vertex order and renumber edges
            new_polys = []
            for vs in polys:
                n = len(vs)
                new_polys.append([vs[(-j) % n] for j in range(n)])
            lens = [len(p) for p in self.polygons]
            ren = lambda e: (e[0], (-e[1] - 1) % lens[e[0]])
            glue = {ren(e): ren(f) for e, f in glue.items()}
            polys = new_polys
        return TranslationSurface(
            [Polygon(p.name, tuple(vs)) for p, vs in zip(self.polygons, polys)],
            glue,
            float_mode=not exact,
        )

    def to_float(self) -> TranslationSurface:
        return TranslationSurface(self.polygons, self._glue, float_mode=True)

    def require_exact(self, what: str = "this operation") -> None:
        if self.float_mode:
            raise FloatModeUnsupported(f"{what} needs an exact-mode surface")

    def relabel(self, names: Sequence[str] | None = None, order: Sequence[int] | None = None, shifts: Sequence[int] | None = None) -> TranslationSurface:
        """Same surface with polygons renamed, reordered and vertex indices rotated."""
        n = len(self.polygons)
        order = list(order) if order is not None else list(range(n))
        shifts = list(shifts) if shifts is not None else [0] * n
        names = list(names) if names is not None else [self.polygons[i].name for i in order]
        new_index = {old: new for new, old in enumerate(order)}
        polys = []
        for new, old in enumerate(order):
            vs = self.polygons[old].vertices
            k = shifts[new] % len(vs)
            polys.append(Polygon(names[new], tuple(vs[k:] + vs[:k])))

        def ren(e):
            old, i = e
            new = new_index[old]
            return (new, (i - shifts[new]) % len(self.polygons[old]))

        return TranslationSurface(polys, {ren(e): ren(f) for e, f in self._glue.items()}, float_mode=self.float_mode)

    def __repr__(self) -> str:
        mode = "float" if self.float_mode else (f"Q(sqrt({self.field_D}))" if self.field_D else "Q")
        return f"<TranslationSurface {len(self.polygons)} polygons, {self.stratum_signature()}, {mode}>"


def build_surface(polygons: Iterable[tuple[str, Sequence]], gluings: Iterable[tuple[Edge, Edge]]) -> TranslationSurface:
    """Build and validate a surface.

    ``polygons`` is a sequence of ``(name, vertices)``; coordinates may be
    ints, Fractions, ExactReal or scalar strings.  ``gluings`` lists each
    edge pair once (either order).
    """
    polys = []
    for name, vs in polygons:
        polys.append(Polygon(name, tuple((as_exact(x), as_exact(y)) for x, y in vs)))
    glue: dict[Edge, Edge] = {}
    for e, f in gluings:
        e, f = tuple(e), tuple(f)
        for a, b in ((e, f), (f, e)):
            if a in glue and glue[a] != b:
                raise GluingMismatch(f"edge {a} glued twice")
            glue[a] = b
    return TranslationSurface(polys, glue)
