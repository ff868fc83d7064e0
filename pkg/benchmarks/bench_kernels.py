"""Numba versus numpy timings for the float batch kernels.

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Run with FLATLAB_DISABLE_NUMBA=1 to confirm the numpy fallback is what the
library uses when numba is switched off.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from flatlab import _kernels


def random_sl2(n: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(n, 2, 2))
    det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    flip = det < 0
    A[flip, :, 0] *= -1
    det = np.abs(det)
    return A / np.sqrt(det)[:, None, None]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    A = random_sl2(args.n, rng)
    V = rng.normal(size=(2, 64))
    ts = np.linspace(0.1, 3.0, 64)
    psis = np.logspace(-1, -8, 256)

    cases = {
        "iwasawa": lambda b: _kernels.iwasawa_batch(A, backend=b),
        "cartan": lambda b: _kernels.cartan_batch(A, backend=b),
        "bruhat": lambda b: _kernels.bruhat_batch(A, backend=b),
        "track": lambda b: _kernels.track_distances(V, ts, psis, backend=b),
    }
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"n={args.n} default backend={_kernels.DEFAULT_BACKEND}")
    print(f"{'kernel':10s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        if "numba" in backends:
            fn("numba")  # compile outside the timed region
        row = [best_of(lambda: fn(b), args.repeat) for b in backends]
        line = f"{name:10s}" + "".join(f"{t * 1e3:10.2f}ms" for t in row)
        if len(row) == 2:
            line += f"{row[0] / row[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
