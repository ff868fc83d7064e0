"""JSON and CSV reports with fixed schemas.

Every result type has a named schema (an ordered list of typed columns).
Exact scalars are written in the scalar grammar (``1/2``,
``-1/2+1/2*sqrt(5)``), floats with 17 significant digits and always with a
decimal point or exponent, so an exact integer ``8`` and a float ``8.0``
stay distinguishable.  :func:`parse_report` inverts :func:`emit_report`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from .cylinders import Cylinder, CylinderDecomposition, HorizontalSaddle, Status
from .exact import as_exact, parse_scalar
from .experiments import TrackRecord
from .lattice import DirectionReport, HMinimalReport, LatticeEvidence, Verdict
from .saddles import SaddleConnection
from .sl2 import Bruhat, Cartan, DecompositionReport, Iwasawa, Mat2
from .surface import TranslationSurface

FORMATS = ("json", "csv")


# -- scalar text ------------------------------------------------------------


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return repr(float(x))
    s = format(float(x), ".17g")
    if not any(c in s for c in ".e"):
        s += ".0"
    return s


def format_scalar(x) -> str:
    if isinstance(x, float):
        return format_float(x)
    return str(as_exact(x))


def parse_any_scalar(text: str):
    """Inverse of :func:`format_scalar`: floats carry ``.``, ``e``, ``inf`` or ``nan``."""
    t = text.strip()
    if any(c in t for c in ".en") and "sqrt" not in t:
        return float(t)
    return parse_scalar(t)


# -- codecs -----------------------------------------------------------------


@dataclass(frozen=True)
class Codec:
    to_json: Callable[[Any], Any]
    from_json: Callable[[Any], Any]
    to_cell: Callable[[Any], str]
    from_cell: Callable[[str], Any]


def _opt(c: Codec) -> Codec:
    return Codec(
        lambda v: None if v is None else c.to_json(v),
        lambda j: None if j is None else c.from_json(j),
        lambda v: "" if v is None else c.to_cell(v),
        lambda s: None if s == "" else c.from_cell(s),
    )


class _FloatMark:
    """Placeholder so floats can be printed with a fixed number of digits inside JSON."""

    def __init__(self, x: float):
        self.text = format_float(x)


EXACT = Codec(format_scalar, parse_scalar, format_scalar, parse_scalar)
SCALAR = Codec(
    lambda v: _FloatMark(v) if isinstance(v, float) else format_scalar(v),
    lambda j: float(j) if isinstance(j, (int, float)) and not isinstance(j, bool) else parse_scalar(j),
    format_scalar,
    parse_any_scalar,
)
FLOAT = Codec(lambda v: _FloatMark(float(v)), float, lambda v: format_float(float(v)), float)
INT = Codec(int, int, str, int)
BOOL = Codec(bool, bool, lambda v: "true" if v else "false", lambda s: {"true": True, "false": False}[s])
STR = Codec(str, str, str, str)
INT_LIST = Codec(
    lambda v: [int(i) for i in v],
    lambda j: tuple(int(i) for i in j),
    lambda v: ";".join(str(int(i)) for i in v),
    lambda s: tuple(int(i) for i in s.split(";")) if s else (),
)
EXACT_LIST = Codec(
    lambda v: [format_scalar(x) for x in v],
    lambda j: tuple(parse_scalar(x) for x in j),
    lambda v: ";".join(format_scalar(x) for x in v),
    lambda s: tuple(parse_scalar(x) for x in s.split(";")) if s else (),
)
MATRIX = Codec(
    lambda m: ",".join(format_scalar(e) for e in m.entries),
    lambda j: Mat2(*(parse_any_scalar(x) for x in j.split(","))),
    lambda m: ",".join(format_scalar(e) for e in m.entries),
    lambda s: Mat2(*(parse_any_scalar(x) for x in s.split(","))),
)


def _nested(kind: str) -> Codec:
    def to_json(v):
        return [SCHEMAS[kind].to_json_record(x) for x in v]

    def from_json(j):
        return tuple(SCHEMAS[kind].from_json_record(x) for x in j)

    return Codec(
        to_json,
        from_json,
        lambda v: _dump_json_value(to_json(v), indent=None),
        lambda s: from_json(json.loads(s)),
    )


# -- schemas ----------------------------------------------------------------


@dataclass(frozen=True)
class Schema:
    kind: str
    cls: type
    columns: tuple[tuple[str, Codec], ...]
    to_row: Callable[[Any], dict]
    from_row: Callable[[dict], Any]

    @property
    def header(self) -> list[str]:
        return [name for name, _ in self.columns]

    def to_json_record(self, obj) -> dict:
        row = self.to_row(obj)
        return {name: codec.to_json(row[name]) for name, codec in self.columns}

    def from_json_record(self, rec: dict):
        return self.from_row({name: codec.from_json(rec[name]) for name, codec in self.columns})

    def to_cells(self, obj) -> list[str]:
        row = self.to_row(obj)
        return [codec.to_cell(row[name]) for name, codec in self.columns]

    def from_cells(self, cells: Sequence[str]):
        return self.from_row({name: codec.from_cell(c) for (name, codec), c in zip(self.columns, cells)})


@dataclass(frozen=True)
class SurfaceSummary:
    polygons: int
    edges: int
    genus: int
    orders: tuple[int, ...]
    marked_points: int
    area: Any
    field: str
    float_mode: bool

    @classmethod
    def of(cls, M: TranslationSurface) -> SurfaceSummary:
        st = M.stratum_signature()
        field = "float" if M.float_mode else (f"sqrt({M.field_D})" if M.field_D else "rational")
        return cls(len(M.polygons), M.num_edges(), M.genus(), tuple(st.orders), st.marked_points, M.area(), field, M.float_mode)


def _dir_cols():
    return (("direction_p", EXACT), ("direction_q", EXACT))


def _sc_row(s: SaddleConnection) -> dict:
    return {
        "holonomy_x": s.holonomy[0],
        "holonomy_y": s.holonomy[1],
        "length_sq": s.length_sq,
        "length": s.length,
        "angle": s.angle,
        "start": s.start,
        "start_sector": s.start_sector,
        "end": s.end,
        "end_sector": s.end_sector,
    }


def _sc_from(r: dict) -> SaddleConnection:
    return SaddleConnection((r["holonomy_x"], r["holonomy_y"]), r["start"], r["start_sector"], r["end"], r["end_sector"], r["length_sq"])


def _cyl_row(c: Cylinder) -> dict:
    return {
        "direction_p": c.core_direction[0],
        "direction_q": c.core_direction[1],
        "circumference": c.circumference,
        "height": c.height,
        "modulus": c.modulus,
        "twist": c.twist,
        "bottom": c.bottom,
        "top": c.top,
    }


def _cyl_from(r: dict) -> Cylinder:
    return Cylinder(
        r["circumference"], r["height"], r["modulus"], r["bottom"], r["top"], (r["direction_p"], r["direction_q"]), r["twist"]
    )


def _dr_row(d: DirectionReport) -> dict:
    return {
        "direction_p": d.direction[0],
        "direction_q": d.direction[1],
        "status": d.status.value,
        "moduli": d.moduli,
        "commensurable": d.commensurable,
        "moduli_qdim": d.moduli_qdim,
        "saddle_length_ratio": d.saddle_length_ratio,
    }


def _dr_from(r: dict) -> DirectionReport:
    return DirectionReport(
        (r["direction_p"], r["direction_q"]),
        Status(r["status"]),
        r["moduli"],
        r["commensurable"],
        r["moduli_qdim"],
        r["saddle_length_ratio"],
    )


def _sl2_row(x: DecompositionReport) -> dict:
    f = x.factors
    return {
        "which": x.which,
        "branch": x.branch,
        "matrix": x.matrix,
        "factor_1": f[0],
        "factor_2": f[1],
        "factor_3": f[2],
        "residual": x.residual,
    }


def _sl2_from(r: dict) -> DecompositionReport:
    cls = {"iwasawa": Iwasawa, "cartan": Cartan, "bruhat": Bruhat}[r["which"]]
    return DecompositionReport(r["which"], r["matrix"], cls(r["factor_1"], r["factor_2"], r["factor_3"]), r["residual"])


SCHEMAS: dict[str, Schema] = {}


def _register(s: Schema) -> None:
    SCHEMAS[s.kind] = s


_register(
    Schema(
        "saddle_connection",
        SaddleConnection,
        (
            ("holonomy_x", EXACT),
            ("holonomy_y", EXACT),
            ("length_sq", EXACT),
            ("length", FLOAT),
            ("angle", FLOAT),
            ("start", INT),
            ("start_sector", INT),
            ("end", INT),
            ("end_sector", INT),
        ),
        _sc_row,
        _sc_from,
    )
)
_register(
    Schema(
        "cylinder",
        Cylinder,
        _dir_cols()
        + (
            ("circumference", EXACT),
            ("height", EXACT),
            ("modulus", EXACT),
            ("twist", EXACT),
            ("bottom", INT_LIST),
            ("top", INT_LIST),
        ),
        _cyl_row,
        _cyl_from,
    )
)
_register(
    Schema(
        "horizontal_saddle",
        HorizontalSaddle,
        (("index", INT), ("length", EXACT), ("start", INT), ("end", INT)),
        lambda s: {"index": s.index, "length": s.length, "start": s.start, "end": s.end},
        lambda r: HorizontalSaddle(r["index"], r["length"], r["start"], r["end"]),
    )
)
_register(
    Schema(
        "cylinder_decomposition",
        CylinderDecomposition,
        _dir_cols()
        + (
            ("status", STR),
            ("bound", _opt(SCALAR)),
            ("cylinders", _nested("cylinder")),
            ("saddles", _nested("horizontal_saddle")),
        ),
        lambda d: {
            "direction_p": d.direction[0],
            "direction_q": d.direction[1],
            "status": d.status.value,
            "bound": d.bound,
            "cylinders": d.cylinders,
            "saddles": d.saddles,
        },
        lambda r: CylinderDecomposition(
            (r["direction_p"], r["direction_q"]), Status(r["status"]), r["cylinders"], r["saddles"], r["bound"]
        ),
    )
)
_register(
    Schema(
        "direction_report",
        DirectionReport,
        _dir_cols()
        + (
            ("status", STR),
            ("moduli", EXACT_LIST),
            ("commensurable", BOOL),
            ("moduli_qdim", INT),
            ("saddle_length_ratio", _opt(EXACT)),
        ),
        _dr_row,
        _dr_from,
    )
)
_register(
    Schema(
        "hmin",
        HMinimalReport,
        _dir_cols() + (("d", INT), ("period", _opt(EXACT))),
        lambda h: {"direction_p": h.direction[0], "direction_q": h.direction[1], "d": h.torus_dim, "period": h.period},
        lambda r: HMinimalReport((r["direction_p"], r["direction_q"]), r["d"], r["period"]),
    )
)
_register(
    Schema(
        "lattice_evidence",
        LatticeEvidence,
        (
            ("verdict", STR),
            ("scan_bound", SCALAR),
            ("min_triangle_area", _opt(EXACT)),
            ("max_saddle_ratio", _opt(EXACT)),
            ("directions_scanned", INT),
            ("witnesses", _nested("direction_report")),
        ),
        lambda e: {
            "verdict": e.verdict.value,
            "scan_bound": e.scan_bound,
            "min_triangle_area": e.min_triangle_area,
            "max_saddle_ratio": e.max_saddle_ratio,
            "directions_scanned": e.directions_scanned,
            "witnesses": e.witnesses,
        },
        lambda r: LatticeEvidence(
            Verdict(r["verdict"]),
            r["witnesses"],
            r["scan_bound"],
            r["min_triangle_area"],
            r["max_saddle_ratio"],
            r["directions_scanned"],
        ),
    )
)
_register(
    Schema(
        "track",
        TrackRecord,
        (("t", FLOAT), ("psi", FLOAT), ("distance", FLOAT)),
        lambda x: {"t": x.t, "psi": x.psi, "distance": x.distance},
        lambda r: TrackRecord(r["t"], r["psi"], r["distance"]),
    )
)
_register(
    Schema(
        "sl2_decomposition",
        DecompositionReport,
        (
            ("which", STR),
            ("branch", STR),
            ("matrix", MATRIX),
            ("factor_1", MATRIX),
            ("factor_2", MATRIX),
            ("factor_3", MATRIX),
            ("residual", FLOAT),
        ),
        _sl2_row,
        _sl2_from,
    )
)
_register(
    Schema(
        "surface_summary",
        SurfaceSummary,
        (
            ("polygons", INT),
            ("edges", INT),
            ("genus", INT),
            ("orders", INT_LIST),
            ("marked_points", INT),
            ("area", SCALAR),
            ("field", STR),
            ("float_mode", BOOL),
        ),
        lambda s: {
            "polygons": s.polygons,
            "edges": s.edges,
            "genus": s.genus,
            "orders": s.orders,
            "marked_points": s.marked_points,
            "area": s.area,
            "field": s.field,
            "float_mode": s.float_mode,
        },
        lambda r: SurfaceSummary(
            r["polygons"], r["edges"], r["genus"], r["orders"], r["marked_points"], r["area"], r["field"], r["float_mode"]
        ),
    )
)

_BY_CLASS = {
    SaddleConnection: "saddle_connection",
    Cylinder: "cylinder",
    HorizontalSaddle: "horizontal_saddle",
    CylinderDecomposition: "cylinder_decomposition",
    DirectionReport: "direction_report",
    HMinimalReport: "hmin",
    LatticeEvidence: "lattice_evidence",
    TrackRecord: "track",
    DecompositionReport: "sl2_decomposition",
    SurfaceSummary: "surface_summary",
}


def kind_of(obj) -> str:
    try:
        return _BY_CLASS[type(obj)]
    except KeyError:
        raise TypeError(f"no report schema for {type(obj).__name__}") from None


# -- emit / parse -----------------------------------------------------------


def _dump_json_value(value, indent: int | None = 2) -> str:
    marks: list[str] = []

    def swap(v):
        if isinstance(v, _FloatMark):
            marks.append(v.text)
            return f"\x00{len(marks) - 1}\x00"
        if isinstance(v, dict):
            return {k: swap(x) for k, x in v.items()}
        if isinstance(v, list):
            return [swap(x) for x in v]
        return v

    text = json.dumps(swap(value), indent=indent, ensure_ascii=False)
    for i, m in enumerate(marks):
        text = text.replace(json.dumps(f"\x00{i}\x00"), m, 1)
    return text


def _as_list(results) -> list:
    if isinstance(results, (list, tuple)):
        return list(results)
    return [results]


def render_report(results, fmt: str = "json", kind: str | None = None) -> str:
    """Report text for one result or a homogeneous list of results."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; use json or csv")
    items = _as_list(results)
    kinds = {kind_of(x) for x in items}
    if len(kinds) > 1:
        raise TypeError(f"mixed result types in one report: {sorted(kinds)}")
    if kinds:
        k = kinds.pop()
        if kind is not None and kind != k:
            raise TypeError(f"results are {k!r}, not {kind!r}")
        kind = k
    schema = SCHEMAS.get(kind) if kind else None
    if fmt == "json":
        doc = {
            "kind": kind,
            "columns": schema.header if schema else [],
            "records": [schema.to_json_record(x) for x in items] if schema else [],
        }
        return _dump_json_value(doc) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(schema.header if schema else [])
    for x in items:
        w.writerow(schema.to_cells(x))
    return buf.getvalue()


def emit_report(results, fmt: str = "json", path=None, kind: str | None = None) -> str:
    """Render and, when ``path`` is given, write the report.  Returns the text."""
    text = render_report(results, fmt, kind)
    if path is not None and str(path) != "-":
        Path(path).write_text(text, encoding="utf-8")
    return text


def parse_report(text: str, fmt: str = "json", kind: str | None = None) -> list:
    """Objects back from :func:`render_report` output.  CSV needs ``kind``."""
    if fmt == "json":
        doc = json.loads(text)
        kind = doc["kind"] if kind is None else kind
        if kind is None:
            return []
        schema = SCHEMAS[kind]
        return [schema.from_json_record(r) for r in doc["records"]]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    if kind is None:
        raise ValueError("parsing CSV needs the report kind")
    schema = SCHEMAS[kind]
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != schema.header:
        raise ValueError(f"CSV header does not match the {kind!r} schema")
    return [schema.from_cells(r) for r in rows[1:]]


__all__ = [
    "FORMATS",
    "SCHEMAS",
    "SurfaceSummary",
    "emit_report",
    "format_float",
    "format_scalar",
    "kind_of",
    "parse_any_scalar",
    "parse_report",
    "render_report",
]
