"""Timing comparison of the compiled and pure-Python sampling kernels.

Run as a script:

    python3 benchmarks/bench_kernels.py [--shots 1000000] [--batches 2000]

Times mvn_sample (6-dimensional correlated draws, the protocol's hot
path) and linear_mse_batches (batched estimator evaluation) on both
backends and prints the per-call medians and the speedup.
"""

from __future__ import annotations

import argparse
import importlib
import statistics
import time

import numpy as np


def _load_backends():
    backends = {}
    py = importlib.import_module("cvshare._kernels_py")
    backends[py.BACKEND] = py
    try:
        comp = importlib.import_module("cvshare._kernels")
    except ImportError:
        print("compiled backend unavailable; timing the python backend only")
    else:
        backends[comp.BACKEND] = comp
    return backends


def _time(fn, repeats: int = 5) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=1_000_000)
    parser.add_argument("--batches", type=int, default=2_000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    dim = 6
    a = rng.standard_normal((dim, dim))
    cov = a @ a.T + dim * np.eye(dim)
    chol = np.linalg.cholesky(cov)
    mean = rng.standard_normal(dim)

    n_rows = args.batches * max(1, args.shots // args.batches)
    outcomes = rng.standard_normal((n_rows, 3))
    weights = np.array([0.3, -0.7, 1.0])
    truths = rng.standard_normal(n_rows)

    backends = _load_backends()
    results: dict[str, dict[str, float]] = {}
    for name, mod in backends.items():
        gen = np.random.Generator(np.random.PCG64(12345))
        t_mvn = _time(lambda: mod.mvn_sample(gen, mean, chol, args.shots))
        t_mse = _time(lambda: mod.linear_mse_batches(outcomes, weights, truths, args.batches))
        results[name] = {"mvn_sample": t_mvn, "linear_mse_batches": t_mse}
        print(f"{name:>9}: mvn_sample({args.shots} x {dim}) {t_mvn * 1e3:8.2f} ms   "
              f"linear_mse_batches({n_rows} rows) {t_mse * 1e3:8.2f} ms")

    if len(results) == 2:
        for op in ("mvn_sample", "linear_mse_batches"):
            ratio = results["python"][op] / results["compiled"][op]
            print(f"{op}: compiled is {ratio:.2f}x the python backend")


if __name__ == "__main__":
    main()
