"""Plain-text surface files.

::

    # flatlab surface
    field sqrt(5)
    polygon A (0,0) (1,0) (1,1) (0,1)
    glue A.0 A.2
    glue A.1 A.3

``field`` is ``rational``, ``sqrt(D)`` or ``float``.  Edge ``i`` of a
polygon runs from vertex ``i`` to vertex ``i + 1``.  Every edge appears in
exactly one ``glue`` line.  :func:`dumps` writes a canonical form that
:func:`loads` reads back to an equal surface, and re-serialising it gives
the same bytes.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import FieldMismatch, GluingMismatch, ScalarSyntaxError, SurfaceSyntaxError
from .exact import ExactReal, parse_scalar
from .surface import Polygon, TranslationSurface

HEADER = "# flatlab surface"
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_FIELD_RE = re.compile(r"^(rational|float|sqrt\((\d+)\))$")


def _located(exc_type, message: str, line: int, column: int = 0):
    err = exc_type(f"line {line}" + (f", column {column}" if column else "") + f": {message}")
    err.line, err.column = line, column
    return err


def _fmt(x, float_mode: bool) -> str:
    return format(float(x), ".17g") if float_mode else str(x)


def dumps(M: TranslationSurface) -> str:
    if M.float_mode:
        field = "float"
    else:
        field = f"sqrt({M.field_D})" if M.field_D else "rational"
    lines = [HEADER, f"field {field}"]
    for p in M.polygons:
        pts = " ".join(f"({_fmt(x, M.float_mode)},{_fmt(y, M.float_mode)})" for x, y in p.vertices)
        lines.append(f"polygon {p.name} {pts}")
    for e, f in sorted(M.gluings.items()):
        if e < f:
            lines.append(f"glue {M.polygons[e[0]].name}.{e[1]} {M.polygons[f[0]].name}.{f[1]}")
    return "\n".join(lines) + "\n"


def write_surface(M: TranslationSurface, path) -> None:
    Path(path).write_text(dumps(M), encoding="utf-8")


def _scan_points(text: str, start: int, lineno: int):
    """``(x,y)`` groups from ``text[start:]``; yields ``(x_text, y_text, column)``."""
    i, n = start, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        if text[i] != "(":
            raise SurfaceSyntaxError(f"expected '(' but found {text[i]!r}", lineno, i + 1)
        col = i + 1
        depth, comma, j = 0, -1, i
        while j < n:
            c = text[j]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth == 0:
                    break
            elif c == "," and depth == 1:
                if comma >= 0:
                    raise SurfaceSyntaxError("a vertex has exactly two coordinates", lineno, j + 1)
                comma = j
            j += 1
        if j >= n:
            raise SurfaceSyntaxError("unclosed '('", lineno, col)
        if comma < 0:
            raise SurfaceSyntaxError("a vertex needs two coordinates separated by ','", lineno, col)
        yield text[i + 1 : comma].strip(), text[comma + 1 : j].strip(), col, comma + 2
        i = j + 1


def _scalar(tok: str, mode: str, field_D: int, lineno: int, col: int):
    if mode == "float":
        try:
            return float(tok)
        except ValueError:
            raise SurfaceSyntaxError(f"not a number: {tok!r}", lineno, col) from None
    try:
        x = parse_scalar(tok)
    except ScalarSyntaxError as exc:
        raise SurfaceSyntaxError(str(exc), lineno, col) from None
    if x.D and x.D != field_D:
        raise _located(FieldMismatch, f"{tok} is not in the declared field", lineno, col)
    return x


def loads(text: str) -> TranslationSurface:
    mode = None
    field_D = 0
    polys: list[Polygon] = []
    index: dict[str, int] = {}
    glue: dict = {}
    glue_line: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        stripped = line.lstrip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(line) - len(stripped)
        word, _, rest = stripped.partition(" ")
        if word == "field":
            if mode is not None:
                raise SurfaceSyntaxError("duplicate field line", lineno, indent + 1)
            m = _FIELD_RE.match(rest.strip())
            if not m:
                raise SurfaceSyntaxError(f"unknown field {rest.strip()!r}", lineno, indent + 7)
            mode = "float" if m.group(1) == "float" else "exact"
            field_D = int(m.group(2)) if m.group(2) else 0
        elif word == "polygon":
            if mode is None:
                raise SurfaceSyntaxError("'field' must come before the first polygon", lineno, indent + 1)
            if glue_line:
                raise SurfaceSyntaxError("polygons must come before glue lines", lineno, indent + 1)
            name_col = indent + len("polygon ") + 1
            m = _NAME_RE.match(rest)
            if not m:
                raise SurfaceSyntaxError("missing polygon name", lineno, name_col)
            name = m.group(0)
            if name in index:
                raise SurfaceSyntaxError(f"duplicate polygon name {name!r}", lineno, name_col)
            verts = []
            for xs, ys, cx, cy in _scan_points(line, name_col - 1 + m.end(), lineno):
                verts.append((_scalar(xs, mode, field_D, lineno, cx + 1), _scalar(ys, mode, field_D, lineno, cy)))
            if len(verts) < 3:
                raise SurfaceSyntaxError(f"polygon {name} needs at least 3 vertices", lineno, name_col)
            index[name] = len(polys)
            polys.append(Polygon(name, tuple(verts)))
        elif word == "glue":
            toks = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)][1:]
            if len(toks) != 2:
                raise SurfaceSyntaxError("glue takes two edges NAME.INDEX", lineno, indent + 1)
            ends = []
            for tok, col in toks:
                name, dot, idx = tok.rpartition(".")
                if not dot or not idx.isdigit():
                    raise SurfaceSyntaxError(f"bad edge reference {tok!r}", lineno, col)
                if name not in index:
                    raise SurfaceSyntaxError(f"unknown polygon {name!r}", lineno, col)
                p, i = index[name], int(idx)
                if i >= len(polys[p]):
                    raise SurfaceSyntaxError(f"polygon {name} has no edge {i}", lineno, col + len(name) + 1)
                if (p, i) in glue:
                    raise _located(GluingMismatch, f"edge {tok} already glued on line {glue_line[(p, i)]}", lineno, col)
                ends.append((p, i))
            e, f = ends
            if e == f:
                raise _located(GluingMismatch, f"edge {toks[0][0]} glued to itself", lineno, toks[1][1])
            u, v = polys[e[0]].edge(e[1]), polys[f[0]].edge(f[1])
            if mode == "float":
                ok = abs(u[0] + v[0]) <= 1e-9 * (1 + abs(u[0])) and abs(u[1] + v[1]) <= 1e-9 * (1 + abs(u[1]))
            else:
                ok = u[0] + v[0] == 0 and u[1] + v[1] == 0
            if not ok:
                raise _located(
                    GluingMismatch,
                    f"edge vectors ({u[0]}, {u[1]}) and ({v[0]}, {v[1]}) are not opposite",
                    lineno,
                    toks[1][1],
                )
            glue[e], glue[f] = f, e
            glue_line[e] = glue_line[f] = lineno
        else:
            raise SurfaceSyntaxError(f"unknown directive {word!r}", lineno, indent + 1)
    if mode is None:
        raise SurfaceSyntaxError("missing 'field' line", 1, 1)
    if not polys:
        raise SurfaceSyntaxError("no polygons", 1, 1)
    if mode == "exact":
        polys = [Polygon(p.name, tuple((ExactReal(0) + x, ExactReal(0) + y) for x, y in p.vertices)) for p in polys]
    M = TranslationSurface(polys, glue, float_mode=(mode == "float"))
    if mode == "exact" and M.field_D not in (0, field_D):
        raise FieldMismatch(f"coordinates live in Q(sqrt({M.field_D})), not the declared field")
    return M


def parse_surface_file(path) -> TranslationSurface:
    """Read and validate a surface file; errors carry line and column."""
    return loads(Path(path).read_text(encoding="utf-8"))
