"""Time the force kernel per backend and the training loop per worker count.

    python3 benchmarks/bench_kernels.py [--nodes 2000] [--dim 100] [--repeats 3]
"""
import argparse
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from forcembed import kernels
from forcembed.forces import ForceParams
from forcembed.graph import random_graph


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=2000)
    ap.add_argument("--edges", type=int, default=10000)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4])
    args = ap.parse_args()

    g = random_graph(args.nodes, args.edges, seed=0)
    U = np.random.default_rng(0).uniform(-1, 1, size=(args.nodes, args.dim))
    params = ForceParams()
    print(f"graph: {args.nodes} nodes, {args.edges} edges, dim {args.dim}; "
          f"{os.cpu_count()} CPU(s) visible")

    print("\none force evaluation, single thread")
    base = None
    for backend in kernels.AVAILABLE:
        t = best_of(lambda: kernels.compute_forces(g, U, params, backend=backend), args.repeats)
        base = base or t
        print(f"  {backend:<8} {t * 1e3:9.1f} ms   {t / base:6.2f}x of {kernels.AVAILABLE[0]}")

    print(f"\nthread scaling, backend {kernels.BACKEND}")
    t1 = None
    for w in args.workers:
        with ThreadPoolExecutor(max_workers=w) as pool:
            t = best_of(lambda: kernels.compute_forces(g, U, params, pool=pool, workers=w),
                        args.repeats)
        t1 = t1 or t
        print(f"  {w} worker(s) {t * 1e3:9.1f} ms   speedup {t1 / t:5.2f}x")


if __name__ == "__main__":
    main()
