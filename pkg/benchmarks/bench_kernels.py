"""Benchmark the numba and numpy kernel backends against each other.

Usage: python benchmarks/bench_kernels.py [--grids N] [--size N]
"""

import argparse
import time

import numpy as np

from dronefetch.kernels import get_backend


def make_grids(n_grids, size, fill, seed=42):
    rng = np.random.default_rng(seed)
    grids = []
    for _ in range(n_grids):
        occ = (rng.random((size, size)) < fill).astype(np.uint8)
        occ[0, 0] = 0
        occ[size - 1, size - 1] = 0
        grids.append(occ)
    return grids


def bench_astar(impl, grids):
    t0 = time.perf_counter()
    solved = 0
    for occ in grids:
        path, _, _ = impl.astar(occ, 0, 0, occ.shape[0] - 1, occ.shape[1] - 1)
        solved += path is not None
    return time.perf_counter() - t0, solved


def bench_rasterize(impl, n, size, seed=7):
    rng = np.random.default_rng(seed)
    circles = rng.uniform(0, size * 0.1, size=(n, 3, 3))
    circles[:, :, 2] = np.abs(circles[:, :, 2]) * 0.3 + 0.05
    rects = rng.uniform(0, size * 0.1, size=(n, 2, 4))
    rects[:, :, 2:] = np.abs(rects[:, :, 2:]) * 0.2 + 0.05
    t0 = time.perf_counter()
    for k in range(n):
        occ = np.zeros((size, size), dtype=np.uint8)
        impl.rasterize(occ, 0.0, 0.0, 0.1, circles[k], rects[k])
    return time.perf_counter() - t0


def bench_los(impl, grids, queries=200, seed=3):
    rng = np.random.default_rng(seed)
    size = grids[0].shape[0]
    pts = rng.uniform(0.01, size * 0.1 - 0.01, size=(queries, 4))
    t0 = time.perf_counter()
    for occ in grids[:10]:
        for x0, y0, x1, y1 in pts:
            impl.line_of_sight(occ, 0.0, 0.0, 0.1, x0, y0, x1, y1)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", type=int, default=200)
    ap.add_argument("--size", type=int, default=40)
    ap.add_argument("--fill", type=float, default=0.25)
    args = ap.parse_args()

    backends = {"numpy": get_backend("numpy")}
    try:
        backends["numba"] = get_backend("numba")
    except ImportError:
        print("numba unavailable; benchmarking the numpy backend only")

    grids = make_grids(args.grids, args.size, args.fill)

    # JIT warm-up so compilation is not billed to the timings
    for impl in backends.values():
        bench_astar(impl, grids[:1])
        bench_rasterize(impl, 1, args.size)
        bench_los(impl, grids[:1], queries=5)

    results = {}
    for name, impl in backends.items():
        t_astar, solved = bench_astar(impl, grids)
        t_rast = bench_rasterize(impl, args.grids, args.size)
        t_los = bench_los(impl, grids)
        results[name] = (t_astar, t_rast, t_los)
        print(f"{name:>6}:  astar {t_astar:7.3f} s ({args.grids} grids, {solved} solved)   "
              f"rasterize {t_rast:7.3f} s   line-of-sight {t_los:7.3f} s")

    if "numba" in results:
        for i, label in enumerate(("astar", "rasterize", "line-of-sight")):
            ratio = results["numpy"][i] / max(results["numba"][i], 1e-12)
            print(f"numba speedup on {label}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
