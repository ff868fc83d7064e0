"""Experiment drivers: rotation-versus-horocycle tracking and the periodic-direction orbit survey."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .lattice import HMinimalReport, orbit_survey
from .surface import TranslationSurface
from .triangulation import triangulate

DEFAULT_T_GRID = (0.5, 1.0, 2.0)
DEFAULT_PSI_GRID = tuple(10.0**-k for k in range(1, 7))


@dataclass(frozen=True)
class TrackRecord:
    """Distance between ``g_t r_psi M`` and ``h_{-e^{2t} tan psi} g_t M`` in marked period coordinates."""

    t: float
    psi: float
    distance: float


@dataclass(frozen=True)
class ExperimentConfig:
    surface: str
    bound: float = 8.0
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    psi_grid: tuple[float, ...] = DEFAULT_PSI_GRID
    epsilon: float = 1e-3
    format: str = "json"
    workers: int = 1
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.t_grid or not self.psi_grid:
            raise ValueError("experiment grids must be nonempty")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")


def period_matrix(M: TranslationSurface) -> np.ndarray:
    """``(2, E)`` float array of edge holonomies of one fixed triangulation of ``M``."""
    vecs = triangulate(M).period_vectors()
    return np.array([[float(v[0]) for v in vecs], [float(v[1]) for v in vecs]], dtype=np.float64)


def track_experiment(
    M: TranslationSurface,
    t_list: Sequence[float] = DEFAULT_T_GRID,
    psi_list: Sequence[float] = DEFAULT_PSI_GRID,
    *,
    backend: str | None = None,
) -> list[TrackRecord]:
    """One record per ``(t, psi)``, grouped by ``t`` in the order given.

    Both surfaces are linear images of the same triangulated ``M``, so
    their period coordinates share a marking and can be compared directly.
    """
    if not len(t_list) or not len(psi_list):
        return []
    V = period_matrix(M)
    D = _kernels.track_distances(V, list(t_list), list(psi_list), backend=backend)
    return [
        TrackRecord(float(t), float(psi), float(D[i, j]))
        for i, t in enumerate(t_list)
        for j, psi in enumerate(psi_list)
    ]


__all__ = [
    "ExperimentConfig",
    "HMinimalReport",
    "TrackRecord",
    "orbit_survey",
    "period_matrix",
    "track_experiment",
]
