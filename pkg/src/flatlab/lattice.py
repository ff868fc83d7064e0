"""Lattice-surface evidence: periodic-direction scans, moduli commensurability, H-minimal tori.

A scan walks every saddle-connection direction up to a length bound and
decomposes the surface there.  A periodic direction whose cylinder moduli
are not pairwise commensurable rules the lattice property out; directions
that could not be decomposed within the tracing bound make a verdict
inconclusive.  Nothing here proves that a surface *is* a lattice surface.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key

from .cylinders import CylinderDecomposition, Status, canonical_direction, decompose
from .errors import InsufficientSaddleConnections, NotDecomposed
from .exact import ExactReal, as_exact, commensurable, qspan_dim
from .saddles import DEFAULT_MAX_NODES, compare_angle, min_virtual_triangle_area, saddle_connections
from .surface import TranslationSurface


@dataclass(frozen=True)
class DirectionReport:
    direction: tuple
    status: Status
    moduli: tuple[ExactReal, ...]
    commensurable: bool
    moduli_qdim: int
    saddle_length_ratio: ExactReal | None

    @classmethod
    def from_decomposition(cls, dec: CylinderDecomposition) -> DirectionReport:
        if not dec.decomposed:
            return cls(tuple(dec.direction), dec.status, (), False, 0, None)
        moduli = tuple(dec.moduli)
        qdim = qspan_dim(list(moduli)).dimension
        return cls(tuple(dec.direction), dec.status, moduli, qdim == 1, qdim, dec.saddle_length_ratio())


@dataclass(frozen=True)
class HMinimalReport:
    direction: tuple
    torus_dim: int
    period: ExactReal | None = None


class Verdict(str, Enum):
    CONSISTENT = "ConsistentWithLattice"
    WITNESS_AGAINST = "WitnessAgainst"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LatticeEvidence:
    verdict: Verdict
    witnesses: tuple[DirectionReport, ...]
    scan_bound: object
    min_triangle_area: ExactReal | None
    max_saddle_ratio: ExactReal | None
    directions_scanned: int = 0
    reports: tuple[DirectionReport, ...] = field(default=(), compare=False, repr=False)


def direction_report(M: TranslationSurface, direction, bound=None) -> DirectionReport:
    return DirectionReport.from_decomposition(decompose(M, direction, bound))


def scan_directions(M: TranslationSurface, L, *, scs=None, max_nodes: int = DEFAULT_MAX_NODES) -> list[tuple[ExactReal, ExactReal]]:
    """One vector per saddle-connection direction up to ``L``, ordered by angle in ``[0, pi)``.

    Each direction is represented by its shortest saddle connection (turned
    into the upper half-plane), so horizontal data such as moduli and
    H-orbit periods are measured against a primitive holonomy.
    """
    if scs is None:
        scs = saddle_connections(M, L, max_nodes=max_nodes)
    reps = {}
    for s in scs:  # sorted by length, so the first hit per class is the shortest
        key = canonical_direction(s.holonomy)
        if key not in reps:
            x, y = s.holonomy
            if y.sign() < 0 or (y.sign() == 0 and x.sign() < 0):
                x, y = -x, -y
            reps[key] = (x, y)
    return sorted(reps.values(), key=cmp_to_key(compare_angle))


def _report_many(args):
    M, dirs, bound = args
    return [direction_report(M, d, bound) for d in dirs]


def periodic_scan(
    M: TranslationSurface, L, *, bound=None, workers: int = 1, scs=None, max_nodes: int = DEFAULT_MAX_NODES
) -> list[DirectionReport]:
    """One :class:`DirectionReport` per saddle-connection direction of length at most ``L``."""
    M.require_exact("periodic_scan()")
    dirs = scan_directions(M, L, scs=scs, max_nodes=max_nodes)
    if workers > 1 and len(dirs) > 1:
        chunks = [dirs[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_report_many, [(M, c, bound) for c in chunks]))
        by_dir = {r.direction: r for part in parts for r in part}
        return [by_dir[d] for d in dirs]
    return _report_many((M, dirs, bound))


def h_minimal_analysis(M: TranslationSurface, decomposition: CylinderDecomposition) -> HMinimalReport:
    """Dimension of the horocycle-minimal torus and, when it is a circle, its exact period.

    For ``d = 1`` every modulus is a rational multiple ``r_i`` of the first
    one; the least ``s > 0`` with every ``s * mu_i`` an integer is
    ``lcm(denominators of r_i) / mu_1``.
    """
    if not decomposition.decomposed:
        raise NotDecomposed("h-minimal analysis needs a periodic direction")
    moduli = decomposition.moduli
    d = qspan_dim(moduli).dimension
    if d != 1:
        return HMinimalReport(tuple(decomposition.direction), d, None)
    mu1 = moduli[0]
    t = 1
    for mu in moduli:
        r = commensurable(mu, mu1)
        t = math.lcm(t, Fraction(r).denominator)
    return HMinimalReport(tuple(decomposition.direction), 1, ExactReal(t) / mu1)


def lattice_evidence(
    M: TranslationSurface, L, *, bound=None, workers: int = 1, max_nodes: int = DEFAULT_MAX_NODES
) -> LatticeEvidence:
    M.require_exact("lattice_evidence()")
    scs = saddle_connections(M, L, max_nodes=max_nodes)
    reports = periodic_scan(M, L, bound=bound, workers=workers, scs=scs)
    witnesses = tuple(r for r in reports if r.status is Status.DECOMPOSED and not r.commensurable)
    if witnesses:
        verdict = Verdict.WITNESS_AGAINST
    elif any(r.status is Status.UNDECIDED for r in reports) or not reports:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.CONSISTENT
    try:
        area = min_virtual_triangle_area(M, L, scs)
    except InsufficientSaddleConnections:
        area = None
    ratios = [r.saddle_length_ratio for r in reports if r.saddle_length_ratio is not None]
    return LatticeEvidence(verdict, witnesses, L, area, max(ratios) if ratios else None, len(reports), tuple(reports))


def orbit_survey(
    M: TranslationSurface, L, *, bound=None, workers: int = 1, max_nodes: int = DEFAULT_MAX_NODES
) -> list[HMinimalReport]:
    """H-minimal analysis for every periodic saddle-connection direction up to ``L``."""
    M.require_exact("orbit_survey()")
    dirs = scan_directions(M, L, max_nodes=max_nodes)
    if workers > 1 and len(dirs) > 1:
        chunks = [dirs[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_survey_many, [(M, c, bound) for c in chunks]))
        by_dir = {r.direction: r for part in parts for r in part}
        return [by_dir[d] for d in dirs if d in by_dir]
    return _survey_many((M, dirs, bound))


def _survey_many(args):
    M, dirs, bound = args
    rows = []
    for d in dirs:
        dec = decompose(M, d, bound)
        if dec.decomposed:
            rows.append(h_minimal_analysis(M, dec))
    return rows


def shear_all(M: TranslationSurface, decomposition: CylinderDecomposition, s) -> TranslationSurface:
    """The horocycle image ``h_s`` of ``M`` written cylinder by cylinder in the decomposition's frame."""
    from .cylinders import shear_cylinders

    return shear_cylinders(M, decomposition, None, as_exact(s))
