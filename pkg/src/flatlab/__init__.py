"""Exact computations on translation surfaces.

Quadratic-field arithmetic, polygon surfaces and their triangulations,
saddle connections, cylinder decompositions, lattice-surface evidence and
SL(2, R) matrix decompositions.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .builders import from_expression, golden_l, l_origami, octagon, origami, perturbed_l, torus
from .cylinders import (
    Cylinder,
    CylinderDecomposition,
    decompose,
    direction_normalizer,
    shear_cylinders,
    stretch_cylinders,
)
from .errors import *  # noqa: F401,F403
from .exact import ExactReal, QSpanReport, commensurable, parse_scalar, qspan_dim
from .experiments import ExperimentConfig, TrackRecord, track_experiment
from .lattice import (
    DirectionReport,
    HMinimalReport,
    LatticeEvidence,
    Verdict,
    direction_report,
    h_minimal_analysis,
    lattice_evidence,
    orbit_survey,
    periodic_scan,
)
from .reports import emit_report, parse_report
from .saddles import SaddleConnection, in_thick_part, min_virtual_triangle_area, saddle_connections, systole
from .sl2 import Mat2, bruhat, cartan, conj_shear, iwasawa
from .surface import Polygon, TranslationSurface, build_surface
from .surface_io import dumps, loads, parse_surface_file
from .triangulation import Triangulation, canonical_code, delaunay, equivalent, triangulate
