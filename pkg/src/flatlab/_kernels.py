"""Float kernels for the batched hot loops.

Two interchangeable backends live here: numba ``@njit`` loops and
vectorised numpy.  The backend is picked once at import time; set
``FLATLAB_DISABLE_NUMBA=1`` to force the numpy path (numba is also skipped
automatically when it cannot be imported).  Both backends share the exact
same signatures, so callers pass ``backend=`` only in tests and benchmarks.

Parametrisations (all matrices in SL2(R), ``r(x)`` the rotation by ``x``):

* Iwasawa:  ``A = r(theta) @ diag(e^t, e^-t) @ [[1, s], [0, 1]]``
* Cartan:   ``A = r(phi) @ diag(e^t, e^-t) @ r(theta)`` with ``t >= 0``
* Bruhat:   ``A = [[1, 0], [x, 1]] @ diag(lam, 1/lam) @ [[1, y], [0, 1]]``
  (branch 0) or ``A = iota @ diag(lam, 1/lam) @ [[1, y], [0, 1]]`` (branch 1)
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("FLATLAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised through the env flag
    HAVE_NUMBA = False

DEFAULT_BACKEND = "numba" if HAVE_NUMBA else "numpy"

# below this ratio of the two half-norms a matrix is treated as a rotation
_ROTATION_TOL = 1e-15


# -- numpy backend ----------------------------------------------------------


def _split(A):
    A = np.asarray(A, dtype=np.float64)
    return A[:, 0, 0], A[:, 0, 1], A[:, 1, 0], A[:, 1, 1]


def iwasawa_np(A):
    a, b, c, d = _split(A)
    r2 = a * a + c * c
    theta = np.arctan2(c, a)
    t = 0.5 * np.log(r2)
    s = (a * b + c * d) / r2
    return theta, t, s


def cartan_np(A):
    a, b, c, d = _split(A)
    e, f, g, h = (a + d) / 2, (a - d) / 2, (c + b) / 2, (c - b) / 2
    q = np.hypot(e, h)
    r = np.hypot(f, g)
    a1 = np.arctan2(g, f)
    a2 = np.arctan2(h, e)
    rot = r <= _ROTATION_TOL * q
    phi = np.where(rot, a2, (a2 + a1) / 2)
    theta = np.where(rot, 0.0, (a2 - a1) / 2)
    t = np.log(q + r)
    return phi, t, theta


def bruhat_np(A):
    a, b, c, d = _split(A)
    branch = (a == 0).astype(np.int64)
    safe_a = np.where(branch == 1, 1.0, a)
    safe_c = np.where(branch == 1, c, 1.0)
    x = np.where(branch == 1, 0.0, c / safe_a)
    lam = np.where(branch == 1, c, a)
    y = np.where(branch == 1, d / safe_c, b / safe_a)
    return branch, x, lam, y


def track_distances_np(V, ts, psis):
    """Distances between ``g_t r_psi V`` and ``h_{-e^{2t} tan psi} g_t V``.

    ``V`` is a ``(2, E)`` array of marked edge holonomies; the result has
    shape ``(len(ts), len(psis))``.
    """
    V = np.asarray(V, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)[:, None]
    psis = np.asarray(psis, dtype=np.float64)[None, :]
    et, emt = np.exp(ts), np.exp(-ts)
    cs, sn, tn = np.cos(psis), np.sin(psis), np.tan(psis)
    # first matrix: g_t r_psi
    p11, p12, p21, p22 = et * cs, -et * sn, emt * sn, emt * cs
    # second matrix: h_u g_t with u = -e^{2t} tan psi
    u = -np.exp(2 * ts) * tn
    q11, q12, q21, q22 = et, u * emt, 0.0, emt
    x, y = V[0][None, None, :], V[1][None, None, :]
    dx = (p11 - q11)[..., None] * x + (p12 - q12)[..., None] * y
    dy = (p21 - q21)[..., None] * x + (p22 - q22)[..., None] * y
    return np.sqrt(np.sum(dx * dx + dy * dy, axis=-1))


# -- numba backend ----------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _iwasawa_nb(A):
        n = A.shape[0]
        theta = np.empty(n)
        t = np.empty(n)
        s = np.empty(n)
        for i in range(n):
            a, b, c, d = A[i, 0, 0], A[i, 0, 1], A[i, 1, 0], A[i, 1, 1]
            r2 = a * a + c * c
            theta[i] = np.arctan2(c, a)
            t[i] = 0.5 * np.log(r2)
            s[i] = (a * b + c * d) / r2
        return theta, t, s

    @njit(cache=True)
    def _cartan_nb(A):
        n = A.shape[0]
        phi = np.empty(n)
        t = np.empty(n)
        theta = np.empty(n)
        for i in range(n):
            a, b, c, d = A[i, 0, 0], A[i, 0, 1], A[i, 1, 0], A[i, 1, 1]
            e, f, g, h = (a + d) / 2, (a - d) / 2, (c + b) / 2, (c - b) / 2
            q = np.hypot(e, h)
            r = np.hypot(f, g)
            a1 = np.arctan2(g, f)
            a2 = np.arctan2(h, e)
            if r <= _ROTATION_TOL * q:
                phi[i] = a2
                theta[i] = 0.0
            else:
                phi[i] = (a2 + a1) / 2
                theta[i] = (a2 - a1) / 2
            t[i] = np.log(q + r)
        return phi, t, theta

    @njit(cache=True)
    def _bruhat_nb(A):
        n = A.shape[0]
        branch = np.zeros(n, dtype=np.int64)
        x = np.zeros(n)
        lam = np.empty(n)
        y = np.empty(n)
        for i in range(n):
            a, b, c, d = A[i, 0, 0], A[i, 0, 1], A[i, 1, 0], A[i, 1, 1]
            if a != 0.0:
                x[i] = c / a
                lam[i] = a
                y[i] = b / a
            else:
                branch[i] = 1
                lam[i] = c
                y[i] = d / c
        return branch, x, lam, y

    @njit(cache=True)
    def _track_nb(V, ts, psis):
        out = np.empty((ts.shape[0], psis.shape[0]))
        for i in range(ts.shape[0]):
            et = np.exp(ts[i])
            emt = np.exp(-ts[i])
            e2t = np.exp(2 * ts[i])
            for j in range(psis.shape[0]):
                cs, sn, tn = np.cos(psis[j]), np.sin(psis[j]), np.tan(psis[j])
                d11 = et * cs - et
                d12 = -et * sn + e2t * tn * emt
                d21 = emt * sn
                d22 = emt * cs - emt
                acc = 0.0
                for k in range(V.shape[1]):
                    dx = d11 * V[0, k] + d12 * V[1, k]
                    dy = d21 * V[0, k] + d22 * V[1, k]
                    acc += dx * dx + dy * dy
                out[i, j] = np.sqrt(acc)
        return out


def _pick(backend: str | None) -> str:
    backend = backend or DEFAULT_BACKEND
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def _as_batch(A):
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 3 or A.shape[1:] != (2, 2):
        raise ValueError("expected an array of shape (N, 2, 2)")
    return A


def iwasawa_batch(A, backend: str | None = None):
    A = _as_batch(A)
    return _iwasawa_nb(A) if _pick(backend) == "numba" else iwasawa_np(A)


def cartan_batch(A, backend: str | None = None):
    A = _as_batch(A)
    return _cartan_nb(A) if _pick(backend) == "numba" else cartan_np(A)


def bruhat_batch(A, backend: str | None = None):
    A = _as_batch(A)
    return _bruhat_nb(A) if _pick(backend) == "numba" else bruhat_np(A)


def track_distances(V, ts, psis, backend: str | None = None):
    V = np.ascontiguousarray(V, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    psis = np.ascontiguousarray(psis, dtype=np.float64)
    if _pick(backend) == "numba":
        return _track_nb(V, ts, psis)
    return track_distances_np(V, ts, psis)


# -- recomposition (shared, plain numpy) ------------------------------------


def _rot(x):
    c, s = np.cos(x), np.sin(x)
    R = np.empty(x.shape + (2, 2))
    R[..., 0, 0], R[..., 0, 1], R[..., 1, 0], R[..., 1, 1] = c, -s, s, c
    return R


def _diag(lam):
    D = np.zeros(lam.shape + (2, 2))
    D[..., 0, 0], D[..., 1, 1] = lam, 1.0 / lam
    return D


def _upper(s):
    N = np.zeros(s.shape + (2, 2))
    N[..., 0, 0] = N[..., 1, 1] = 1.0
    N[..., 0, 1] = s
    return N


def recompose_iwasawa(theta, t, s):
    return _rot(theta) @ _diag(np.exp(t)) @ _upper(s)


def recompose_cartan(phi, t, theta):
    return _rot(phi) @ _diag(np.exp(t)) @ _rot(theta)


def recompose_bruhat(branch, x, lam, y):
    left = np.zeros(x.shape + (2, 2))
    lower = branch == 0
    left[lower, 0, 0] = left[lower, 1, 1] = 1.0
    left[lower, 1, 0] = x[lower]
    left[~lower, 0, 1] = -1.0
    left[~lower, 1, 0] = 1.0
    return left @ _diag(lam) @ _upper(y)
