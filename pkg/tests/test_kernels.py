from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatlab import _kernels
from flatlab.builders import golden_l, octagon, torus
from flatlab.experiments import ExperimentConfig, period_matrix, track_experiment

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable or disabled")


def _batch(seed: int, n: int = 500) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.3, 2.0, n) * rng.choice([-1.0, 1.0], n)
    b, c = rng.uniform(-2, 2, n), rng.uniform(-2, 2, n)
    A = np.empty((n, 2, 2))
    A[:, 0, 0], A[:, 0, 1], A[:, 1, 0], A[:, 1, 1] = a, b, c, (1 + b * c) / a
    A[::10, 0, 0] = 0.0
    A[::10, 0, 1] = -1.0 / A[::10, 1, 0]
    A[7] = np.eye(2)
    A[8] = [[0.6, -0.8], [0.8, 0.6]]
    return A


@needs_numba
@pytest.mark.parametrize("name", ["iwasawa", "cartan", "bruhat"])
def test_backends_agree(name):
    fn = getattr(_kernels, f"{name}_batch")
    A = _batch(0)
    for x, y in zip(fn(A, "numpy"), fn(A, "numba")):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12)


@needs_numba
def test_track_backends_agree():
    V = period_matrix(golden_l())
    ts, psis = [0.5, 1.0, 2.0], [0.1, 1e-3, 1e-6]
    np.testing.assert_allclose(
        _kernels.track_distances(V, ts, psis, "numpy"), _kernels.track_distances(V, ts, psis, "numba"), rtol=1e-12
    )


@given(st.integers(0, 2**32 - 1))
def test_recomposition(seed):
    A = _batch(seed, 50)
    scale = np.linalg.norm(A, axis=(1, 2))[:, None, None]
    np.testing.assert_allclose(_kernels.recompose_iwasawa(*_kernels.iwasawa_batch(A, "numpy")) / scale, A / scale, atol=1e-13)
    np.testing.assert_allclose(_kernels.recompose_cartan(*_kernels.cartan_batch(A, "numpy")) / scale, A / scale, atol=1e-13)
    np.testing.assert_allclose(_kernels.recompose_bruhat(*_kernels.bruhat_batch(A, "numpy")) / scale, A / scale, atol=1e-13)


def test_cartan_rotation_input():
    R = np.array([[[0.6, -0.8], [0.8, 0.6]]])
    phi, t, theta = _kernels.cartan_batch(R, "numpy")
    assert abs(t[0]) < 1e-15
    np.testing.assert_allclose(_kernels.recompose_cartan(phi, t, theta), R, atol=1e-15)


def test_shape_and_backend_checks():
    with pytest.raises(ValueError):
        _kernels.iwasawa_batch(np.eye(2))
    with pytest.raises(ValueError):
        _kernels.iwasawa_batch(np.eye(2)[None], backend="cuda")


def test_disable_flag():
    code = "from flatlab import _kernels as k; print(k.HAVE_NUMBA, k.DEFAULT_BACKEND)\ntry:\n k.iwasawa_batch([[[1.,0.],[0.,1.]]], 'numba')\nexcept RuntimeError: print('refused')"
    env = dict(os.environ, FLATLAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["False", "numpy", "refused"]


@pytest.mark.parametrize("build", [octagon, golden_l, torus])
def test_tracking_distances_shrink(build):
    psis = [10.0**-k for k in range(1, 7)]
    recs = track_experiment(build(), [0.5, 1.0, 2.0], psis, backend="numpy")
    assert len(recs) == 18
    for t in (0.5, 1.0, 2.0):
        ds = [r.distance for r in recs if r.t == t]
        assert all(x > y for x, y in zip(ds, ds[1:]))
        assert ds[-1] < 1e-3


def test_track_empty_grid():
    assert track_experiment(torus(), [], [0.1]) == []


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("torus", t_grid=())
    with pytest.raises(ValueError):
        ExperimentConfig("torus", epsilon=0)
    assert ExperimentConfig("torus").psi_grid[-1] == pytest.approx(1e-6)
