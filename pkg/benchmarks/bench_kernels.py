"""Compare the numba and numpy paths of the hot kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Prints best-of-N wall time per kernel and path, and checks that both paths
agree.  The first numba call (compilation) is excluded.
"""
import argparse
import time

import numpy as np

from clab import _kernels
from clab.jets import _mul_tables, n_monomials


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_jet_mul(repeat, order=4, batch=20_000):
    rng = np.random.default_rng(0)
    M = n_monomials(order)
    a = rng.standard_normal((M, batch))
    b = rng.standard_normal((M, batch))
    I, J, K, starts = _mul_tables(order)
    ref = _kernels.jet_mul_numpy(a, b, I, J, starts)
    got = _kernels.jet_mul_numba(a, b, I, J, K, M)
    assert np.allclose(ref, got, rtol=1e-12, atol=1e-12)
    t_np = best_of(lambda: _kernels.jet_mul_numpy(a, b, I, J, starts), repeat)
    t_nb = best_of(lambda: _kernels.jet_mul_numba(a, b, I, J, K, M), repeat)
    return t_np, t_nb


def bench_cell_segments(repeat, n=512):
    x = np.linspace(-1, 1, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    vals = np.sin(7 * X) * np.cos(5 * Y) + 0.1
    xc = 0.5 * (x[1:] + x[:-1])
    XC, YC = np.meshgrid(xc, xc, indexing="ij")
    center = np.sin(7 * XC) * np.cos(5 * YC) + 0.1
    ref = _kernels.cell_segments(vals, center, use_numba=False)
    got = _kernels.cell_segments(vals, center, use_numba=True)
    key = lambda s: np.lexsort(s.T[::-1])
    assert np.array_equal(ref[key(ref)], got[key(got)])
    t_np = best_of(lambda: _kernels.cell_segments(vals, center, use_numba=False), repeat)
    t_nb = best_of(lambda: _kernels.cell_segments(vals, center, use_numba=True), repeat)
    return t_np, t_nb


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable")
    print(f"{'kernel':<16s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, fn in (("jet_mul", bench_jet_mul), ("cell_segments", bench_cell_segments)):
        t_np, t_nb = fn(args.repeat)
        print(f"{name:<16s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
