"""Compare the compiled kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py [--n-max 22] [--t 9.0]

Reports words/second for the orbit enumeration kernel and branches/second
for the backward first-passage kernel, for whichever backends are
importable, and cross-checks that both produce identical results.
"""
from __future__ import annotations

import argparse
import importlib
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))


def _load_backend(name: str):
    os.environ["SUSPFLOW_KERNEL"] = name
    import suspflow._kernels as K
    importlib.reload(K)
    if K.BACKEND != name:
        return None
    return K


def bench_orbits(K, roof, n_max: int) -> tuple[float, float, np.ndarray]:
    lengths = list(range(1, n_max + 1))
    thresholds = np.array([float(n_max)])
    t0 = time.perf_counter()
    counts, mn, mx, *_ = K.orbit_counts(
        roof.ell, roof.c0, np.asarray(roof.cos_coeffs),
        np.asarray(roof.sin_coeffs), lengths, thresholds,
        -1.0, float(2 ** 62))
    dt = time.perf_counter() - t0
    words = float(sum(roof.ell ** n for n in lengths))
    return dt, words / dt, counts


def bench_backward(K, roof, t: float, reps: int = 20):
    xs = np.linspace(0.05, 0.95, reps)
    t0 = time.perf_counter()
    total = 0
    out = []
    for x in xs:
        k, j, y, shear, times = K.backward_branches(
            roof.ell, roof.c0, np.asarray(roof.cos_coeffs),
            np.asarray(roof.sin_coeffs), float(x), 0.0, t, float(2 ** 40))
        total += len(k)
        out.append((k, j, y, shear, times))
    dt = time.perf_counter() - t0
    return dt, total / dt, out


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=22)
    ap.add_argument("--t", type=float, default=9.0)
    args = ap.parse_args()

    from suspflow.roof import standard_roof
    roof = standard_roof()

    results = {}
    for name in ("compiled", "fallback"):
        K = _load_backend(name)
        if K is None:
            print(f"{name:>9}: not available")
            continue
        dt_o, rate_o, counts = bench_orbits(K, roof, args.n_max)
        dt_b, rate_b, branches = bench_backward(K, roof, args.t)
        results[name] = (counts, branches)
        print(f"{name:>9}: orbits n<={args.n_max}: {dt_o:8.3f} s "
              f"({rate_o / 1e6:8.2f} Mwords/s) | "
              f"backward t={args.t}: {dt_b:7.3f} s ({rate_b / 1e3:7.1f} kbranch/s)")

    if len(results) == 2:
        (c1, b1), (c2, b2) = results["compiled"], results["fallback"]
        same = np.array_equal(c1, c2) and all(
            all(np.array_equal(x, y) for x, y in zip(p, q))
            for p, q in zip(b1, b2))
        print("cross-check:", "identical" if same else "MISMATCH")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
