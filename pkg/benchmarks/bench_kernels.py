"""Compare the compiled and numpy kernels on the workloads the cloak uses.

Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import time

import numpy as np

from activecloak import _pykernels

try:
    from activecloak import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--order", type=int, default=59)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    t = rng.uniform(1.0, 150.0, args.points)
    theta = rng.uniform(-np.pi, np.pi, args.points)
    coeffs = rng.normal(size=2 * args.order + 1) + 1j * rng.normal(size=2 * args.order + 1)

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels not built; timing the numpy fallback only")

    print(f"{args.points} points, order {args.order}, best of {args.repeat}")
    results = {}
    for name, mod in backends:
        jy = best_of(lambda: mod.jy_table(args.order, t), args.repeat)
        ms = best_of(lambda: mod.multipole_sum(coeffs, t, theta), args.repeat)
        results[name] = (jy, ms)
        print(f"{name:>7}: jy_table {jy:.4f} s  multipole_sum {ms:.4f} s")
    if len(results) == 2:
        (pj, pm), (cj, cm) = results["python"], results["cython"]
        print(f"speedup: jy_table {pj / cj:.1f}x  multipole_sum {pm / cm:.1f}x")


if __name__ == "__main__":
    main()
