"""Named surface builders: torus, regular octagon, golden L, origamis, perturbed L."""

from __future__ import annotations

import re
import shlex
from fractions import Fraction
from typing import Sequence

from .errors import InvariantViolation, SurfaceSyntaxError
from .exact import ExactReal, as_exact
from .surface import TranslationSurface, build_surface

PHI = ExactReal(Fraction(1, 2), Fraction(1, 2), 5)
SQRT2 = ExactReal(0, 1, 2)


def torus() -> TranslationSurface:
    """Unit square with opposite sides glued."""
    return build_surface(
        [("A", [(0, 0), (1, 0), (1, 1), (0, 1)])],
        [((0, 0), (0, 2)), ((0, 1), (0, 3))],
    )


def parallelogram_torus(u, v) -> TranslationSurface:
    """Torus spanned by the exact vectors ``u`` and ``v`` (``cross(u, v) > 0``)."""
    u = (as_exact(u[0]), as_exact(u[1]))
    v = (as_exact(v[0]), as_exact(v[1]))
    z = ExactReal(0)
    return build_surface(
        [("A", [(z, z), u, (u[0] + v[0], u[1] + v[1]), v])],
        [((0, 0), (0, 2)), ((0, 1), (0, 3))],
    )


def octagon() -> TranslationSurface:
    """Regular octagon with side 1, opposite sides glued (genus 2, one cone point of angle 6*pi)."""
    h = SQRT2 / 2
    one, zero = ExactReal(1), ExactReal(0)
    vs = [
        (zero, zero),
        (one, zero),
        (one + h, h),
        (one + h, one + h),
        (one, one + SQRT2),
        (zero, one + SQRT2),
        (-h, one + h),
        (-h, h),
    ]
    return build_surface([("O", vs)], [((0, i), (0, i + 4)) for i in range(4)])


def golden_l() -> TranslationSurface:
    """L-shaped table with outer sides ``phi``: the square ``[0,1]^2`` plus rectangles to its right and top."""
    one = ExactReal(1)
    w = PHI - 1
    return build_surface(
        [
            ("A", [(0, 0), (one, 0), (one, one), (0, one)]),
            ("B", [(one, 0), (PHI, 0), (PHI, one), (one, one)]),
            ("C", [(0, one), (one, one), (one, PHI), (0, PHI)]),
        ],
        [
            ((0, 1), (1, 3)),  # A right | B left
            ((0, 2), (2, 0)),  # A top | C bottom
            ((0, 0), (2, 2)),  # A bottom | C top
            ((0, 3), (1, 1)),  # A left | B right
            ((1, 0), (1, 2)),  # B bottom | B top
            ((2, 1), (2, 3)),  # C right | C left
        ],
    )


def parse_permutation(text: str, n: int | None = None) -> list[int]:
    """Cycle notation over labels ``1..n`` to a 0-based list image."""
    cycles = re.findall(r"\(([^()]*)\)", text)
    rest = re.sub(r"\(([^()]*)\)", "", text).strip()
    if rest:
        raise SurfaceSyntaxError(f"bad cycle notation {text!r}")
    parsed = []
    for c in cycles:
        items = [int(x) for x in re.split(r"[,\s]+", c.strip()) if x]
        parsed.append(items)
    labels = [x for c in parsed for x in c]
    if len(labels) != len(set(labels)) or any(x < 1 for x in labels):
        raise SurfaceSyntaxError(f"bad cycle notation {text!r}")
    size = max(labels, default=0) if n is None else n
    perm = list(range(size))
    for c in parsed:
        for i, x in enumerate(c):
            if x > size:
                raise SurfaceSyntaxError(f"label {x} exceeds {size} squares")
            perm[x - 1] = c[(i + 1) % len(c)] - 1
    return perm


def origami(sigma_h: str | Sequence[int], sigma_v: str | Sequence[int], n: int | None = None) -> TranslationSurface:
    """Square-tiled surface: square ``i`` has ``sigma_h(i)`` to its right and ``sigma_v(i)`` on top.

    Permutations are cycle strings over ``1..n`` or 0-based image lists.
    """
    if isinstance(sigma_h, str) or isinstance(sigma_v, str):
        size = n
        if size is None:
            size = max(len(parse_permutation(s)) for s in (sigma_h, sigma_v) if isinstance(s, str))
            size = max([size] + [len(s) for s in (sigma_h, sigma_v) if not isinstance(s, str)])
        h = parse_permutation(sigma_h, size) if isinstance(sigma_h, str) else list(sigma_h)
        v = parse_permutation(sigma_v, size) if isinstance(sigma_v, str) else list(sigma_v)
    else:
        h, v = list(sigma_h), list(sigma_v)
    if len(h) != len(v) or sorted(h) != list(range(len(h))) or sorted(v) != list(range(len(v))):
        raise InvariantViolation("origami needs two permutations of the same set")
    size = len(h)
    if size == 0:
        raise InvariantViolation("origami needs at least one square")
    # connectivity
    seen, todo = {0}, [0]
    while todo:
        i = todo.pop()
        for j in (h[i], v[i]):
            if j not in seen:
                seen.add(j)
                todo.append(j)
    if len(seen) != size:
        raise InvariantViolation("origami permutations do not act transitively")
    polys = [(f"S{i + 1}", [(0, 0), (1, 0), (1, 1), (0, 1)]) for i in range(size)]
    glue = []
    for i in range(size):
        glue.append(((i, 1), (h[i], 3)))  # right edge of i to left edge of h(i)
        glue.append(((i, 2), (v[i], 0)))  # top edge of i to bottom edge of v(i)
    return build_surface(polys, glue)


def l_origami() -> TranslationSurface:
    """Three-square L: two squares in a row and one on top of the first."""
    return origami("(1,2)", "(1,3)")


def perturbed_l(eps_x, eps_y) -> TranslationSurface:
    """Three-square L whose top square is replaced by the parallelogram on ``(1, 0)`` and ``(eps_x, 1 + eps_y)``.

    Equivalently the top-left vertex of the L is moved by ``(eps_x, eps_y)``
    (with the top-right corner following so the gluings stay translations).
    """
    ex, ey = as_exact(eps_x), as_exact(eps_y)
    if 1 + ey <= 0:
        raise InvariantViolation("perturbation collapses the top square")
    one = ExactReal(1)
    return build_surface(
        [
            ("S1", [(0, 0), (1, 0), (1, 1), (0, 1)]),
            ("S2", [(0, 0), (1, 0), (1, 1), (0, 1)]),
            ("S3", [(0, 0), (one, 0), (one + ex, one + ey), (ex, one + ey)]),
        ],
        [
            ((0, 1), (1, 3)),
            ((1, 1), (0, 3)),
            ((0, 2), (2, 0)),
            ((2, 2), (0, 0)),
            ((1, 2), (1, 0)),
            ((2, 1), (2, 3)),
        ],
    )


BUILDERS = {
    "torus": (torus, 0),
    "octagon": (octagon, 0),
    "golden-l": (golden_l, 0),
    "l-origami": (l_origami, 0),
    "origami": (origami, 2),
    "perturbed-l": (perturbed_l, 2),
}


def from_builder(name: str, args: Sequence[str] = ()) -> TranslationSurface:
    try:
        fn, nargs = BUILDERS[name]
    except KeyError:
        raise SurfaceSyntaxError(f"unknown builder {name!r}; known: {', '.join(sorted(BUILDERS))}") from None
    if len(args) != nargs:
        raise SurfaceSyntaxError(f"builder {name!r} takes {nargs} argument(s), got {len(args)}")
    return fn(*args)


def from_expression(expr: str) -> TranslationSurface:
    """``"origami (1,2) (1,3)"`` style builder expressions."""
    tokens = shlex.split(expr)
    if not tokens:
        raise SurfaceSyntaxError("empty builder expression")
    return from_builder(tokens[0], tokens[1:])
