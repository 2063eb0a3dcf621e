"""Time the compiled and pure-Python scan kernels on the same grid tables.

    python3 benchmarks/bench_kernels.py --grid 2001 --repeat 5
"""
import argparse
import time

import numpy as np

from clusteropt import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--margin", type=float, default=1e-6)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()

    _, cot, csc2, ok = kernels.grid_tables(args.grid, args.margin)
    print(f"grid {args.grid}x{args.grid}, best of {args.repeat}, threads {args.threads}")
    print(f"{'backend':<10}{'kernel':<15}{'seconds':>10}")
    results = {}
    for name, mod in sorted(kernels.BACKENDS.items()):
        jobs = {
            "norm_grid": lambda: mod.norm_grid(cot, csc2, ok, False, args.threads),
            "count_regions": lambda: mod.count_regions(cot, csc2, ok, 4.0, False, args.threads),
            "grid_min": lambda: mod.grid_min(cot, csc2, ok, 0),
        }
        for kernel, fn in jobs.items():
            t, out = best_of(fn, args.repeat)
            results[(name, kernel)] = (t, out)
            print(f"{name:<10}{kernel:<15}{t:>10.4f}")
    if "compiled" in kernels.BACKENDS:
        for kernel in ("norm_grid", "count_regions", "grid_min"):
            tc, oc = results[("compiled", kernel)]
            tp, op = results[("python", kernel)]
            same = np.array_equal(oc, op, equal_nan=True) if kernel == "norm_grid" else oc == op
            print(f"{kernel}: speedup {tp / tc:.1f}x, identical output: {bool(same)}")
    else:
        print("compiled backend not built; only the python kernels were timed")


if __name__ == "__main__":
    main()
