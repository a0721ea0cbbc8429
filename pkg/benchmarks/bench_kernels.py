"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from trafoens.kernels import backend_module


def _cases():
    rng = np.random.default_rng(0)
    F = np.cumsum(rng.dirichlet(np.ones(7), size=200_000), axis=1)
    F[:, -1] = 1.0
    y = rng.integers(0, 7, size=F.shape[0])
    avg = np.array([0.21, 0.35, 0.18])
    return {
        "rps_rows (n=200000, K=7)": lambda m: m.rps_rows(F, y),
        "binary_regret_scan (999 points)": lambda m: m.binary_regret_scan(0.7, 0.9, 999, 1e-3),
        "rps3_regret_scan (step 0.005)": lambda m: m.rps3_regret_scan(avg, 200),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = {"python": backend_module("python")}
    try:
        mods["cython"] = backend_module("cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':34s} " + " ".join(f"{k:>12s}" for k in mods) + "     speedup")
    for name, call in _cases().items():
        times = {}
        for label, mod in mods.items():
            times[label] = min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
        cols = " ".join(f"{times[k] * 1e3:10.2f}ms" for k in mods)
        speed = f"{times['python'] / times['cython']:9.1f}x" if "cython" in times else ""
        print(f"{name:34s} {cols} {speed}")


if __name__ == "__main__":
    main()
