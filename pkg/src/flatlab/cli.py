"""``flatlab`` command line.

Exit status: 0 on success, 2 for parse or invariant failures, 3 when a
resource cap (``--max-frontier``) is hit.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .builders import from_expression
from .cylinders import decompose
from .errors import FlatlabError, ResourceCapExceeded, ScalarSyntaxError
from .exact import parse_scalar
from .experiments import DEFAULT_PSI_GRID, DEFAULT_T_GRID, ExperimentConfig, track_experiment
from .lattice import h_minimal_analysis, lattice_evidence, orbit_survey, periodic_scan
from .reports import SurfaceSummary, emit_report
from .saddles import DEFAULT_MAX_NODES, saddle_connections
from .sl2 import DecompositionReport, Mat2
from .surface import TranslationSurface
from .surface_io import dumps, parse_surface_file

log = logging.getLogger("flatlab")

EXIT_OK, EXIT_INPUT, EXIT_CAP = 0, 2, 3

DEFAULTS = {
    "format": "json",
    "out": None,
    "workers": os.cpu_count() or 1,
    "max_frontier": DEFAULT_MAX_NODES,
    "bound": None,
    "trace_bound": None,
    "direction": "1,0",
    "t": ",".join(str(t) for t in DEFAULT_T_GRID),
    "psi": ",".join(repr(p) for p in DEFAULT_PSI_GRID),
    "backend": None,
    "directions": False,
    "verbose": False,
}


def load_surface(arg: str) -> TranslationSurface:
    """A surface file path, or a builder expression such as ``"origami (1,2) (1,3)"``."""
    if os.path.isfile(arg):
        return parse_surface_file(arg)
    return from_expression(arg)


def parse_bound(text):
    if text is None or isinstance(text, (int, float)):
        return text
    try:
        return parse_scalar(str(text))
    except ScalarSyntaxError:
        return float(text)


def parse_direction(text: str):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ScalarSyntaxError(f"direction must be 'p,q', got {text!r}")
    return (parse_scalar(parts[0]), parse_scalar(parts[1]))


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


# -- subcommands ------------------------------------------------------------


def cmd_build(ns):
    return dumps(load_surface(ns.surface))


def cmd_show(ns):
    return SurfaceSummary.of(load_surface(ns.surface))


def cmd_saddles(ns):
    M = load_surface(ns.surface)
    if ns.bound is None:
        raise ScalarSyntaxError("saddles needs --bound")
    return saddle_connections(M, parse_bound(ns.bound), max_nodes=ns.max_frontier, workers=ns.workers)


def cmd_cylinders(ns):
    M = load_surface(ns.surface)
    return decompose(M, parse_direction(ns.direction), parse_bound(ns.bound))


def cmd_lattice_scan(ns):
    M = load_surface(ns.surface)
    L = parse_bound(ns.bound if ns.bound is not None else 8)
    kw = dict(bound=parse_bound(ns.trace_bound), workers=ns.workers, max_nodes=ns.max_frontier)
    if ns.directions:
        return periodic_scan(M, L, **kw)
    return lattice_evidence(M, L, **kw)


def cmd_hmin(ns):
    M = load_surface(ns.surface)
    dec = decompose(M, parse_direction(ns.direction), parse_bound(ns.trace_bound))
    return h_minimal_analysis(M, dec)


def cmd_orbit_survey(ns):
    M = load_surface(ns.surface)
    L = parse_bound(ns.bound if ns.bound is not None else 8)
    return orbit_survey(M, L, bound=parse_bound(ns.trace_bound), workers=ns.workers, max_nodes=ns.max_frontier)


def cmd_track(ns):
    cfg = ExperimentConfig(
        surface=ns.surface,
        t_grid=tuple(_floats(ns.t)),
        psi_grid=tuple(_floats(ns.psi)),
        format=ns.format,
        workers=ns.workers,
    )
    log.info("track: surface=%s t=%s psi=%s", cfg.surface, cfg.t_grid, cfg.psi_grid)
    return track_experiment(load_surface(cfg.surface), cfg.t_grid, cfg.psi_grid, backend=ns.backend)


def cmd_sl2(ns):
    return DecompositionReport.of(ns.which, Mat2.parse(ns.matrix))


COMMANDS = {
    "build": cmd_build,
    "show": cmd_show,
    "saddles": cmd_saddles,
    "cylinders": cmd_cylinders,
    "lattice-scan": cmd_lattice_scan,
    "hmin": cmd_hmin,
    "orbit-survey": cmd_orbit_survey,
    "track": cmd_track,
    "sl2": cmd_sl2,
}


# -- argument parsing -------------------------------------------------------


def _global_options(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--format", choices=("json", "csv"), default=S, help="report format (default json)")
    p.add_argument("--out", default=S, help="write the report here instead of stdout")
    p.add_argument("--workers", type=int, default=S, help="worker processes (default: CPU count)")
    p.add_argument("--max-frontier", dest="max_frontier", type=int, default=S, help="enumeration node cap")
    p.add_argument("--config", default=S, help="JSON file with option defaults; flags win")
    p.add_argument("-v", "--verbose", action="store_true", default=S)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="flatlab", description="Exact experiments on translation surfaces.")
    parser.add_argument("--version", action="version", version=f"flatlab {__version__}")
    _global_options(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, surface=True):
        sp = sub.add_parser(name, help=help_text)
        _global_options(sp)
        if surface:
            sp.add_argument("surface", help="surface file or builder expression, e.g. 'golden-l'")
        return sp

    add("build", "print a builder surface in file format")
    add("show", "stratum, genus and area")
    sp = add("saddles", "saddle connections up to a length bound")
    sp.add_argument("--bound", default=S)
    sp = add("cylinders", "cylinder decomposition in a direction")
    sp.add_argument("--direction", default=S, help="p,q (default 1,0)")
    sp.add_argument("--bound", default=S, help="separatrix length cap")
    sp = add("lattice-scan", "scan saddle-connection directions for lattice evidence")
    sp.add_argument("--bound", default=S, help="saddle-connection length bound (default 8)")
    sp.add_argument("--trace-bound", dest="trace_bound", default=S, help="separatrix length cap per direction")
    sp.add_argument("--directions", action="store_true", default=S, help="emit every direction report")
    sp = add("hmin", "H-minimal torus dimension and period in a direction")
    sp.add_argument("--direction", default=S)
    sp.add_argument("--trace-bound", dest="trace_bound", default=S)
    sp = add("orbit-survey", "H-minimal analysis over all periodic directions")
    sp.add_argument("--bound", default=S)
    sp.add_argument("--trace-bound", dest="trace_bound", default=S)
    sp = add("track", "rotation versus horocycle tracking distances")
    sp.add_argument("--t", default=S, help="comma-separated t grid")
    sp.add_argument("--psi", default=S, help="comma-separated psi grid")
    sp.add_argument("--backend", choices=("numba", "numpy"), default=S)
    sp = add("sl2", "SL(2,R) decompositions", surface=False)
    sp.add_argument("action", choices=("decompose",))
    sp.add_argument("--which", choices=("iwasawa", "cartan", "bruhat"), required=True)
    sp.add_argument("--matrix", required=True, help="a,b,c,d (row major)")
    return parser


def resolve_options(ns: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from ``--config`` and then from :data:`DEFAULTS`."""
    config = {}
    if getattr(ns, "config", None):
        config = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        if not isinstance(config, dict):
            raise ScalarSyntaxError("config file must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
    for key, value in DEFAULTS.items():
        if not hasattr(ns, key):
            setattr(ns, key, config.get(key, value))
    return ns


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns = resolve_options(ns)
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(name)s: %(message)s")
        result = COMMANDS[ns.command](ns)
        if isinstance(result, str):
            text = result
            if ns.out:
                Path(ns.out).write_text(text, encoding="utf-8")
        else:
            kind = {"saddles": "saddle_connection", "orbit-survey": "hmin"}.get(ns.command)
            if ns.command == "lattice-scan" and ns.directions:
                kind = "direction_report"
            text = emit_report(result, ns.format, ns.out, kind=kind)
        if not ns.out:
            sys.stdout.write(text)
        return EXIT_OK
    except ResourceCapExceeded as exc:
        print(f"flatlab: resource cap hit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FlatlabError, ValueError, OSError) as exc:
        print(f"flatlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
