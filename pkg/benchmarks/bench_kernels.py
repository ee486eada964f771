"""Time the compiled and numpy trial kernels on the same workload.

    python benchmarks/bench_kernels.py --trials 100000 --repeat 3
"""

import argparse
import time

import numpy as np

from mobdiv import _backend, build_time_grid
from mobdiv.model import ScenarioConfig
from mobdiv.montecarlo import simulate_gaps


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--lambda-s", type=float, default=0.03)
    args = parser.parse_args()

    cfg = ScenarioConfig(sigma0=5.0, sigma_sink=1.0, lambda_s=args.lambda_s, D=500.0, h=20.0,
                         d=20.0, times=tuple(build_time_grid(5.0, 2.0, 10)), trials=args.trials,
                         seed=1)
    results = {}
    for name, kern in _backend.AVAILABLE.items():
        best = np.inf
        for _ in range(args.repeat):
            start = time.perf_counter()
            gaps = simulate_gaps(cfg, backend=kern, workers=1)
            best = min(best, time.perf_counter() - start)
        results[name] = (best, gaps)
        print(f"{name:>9}: {best:7.3f} s  ({args.trials / best:,.0f} trials/s)")

    if len(results) == 2:
        (tc, gc), (tp, gp) = results["compiled"], results["python"]
        fin = np.isfinite(gp)
        diff = float(np.max(np.abs(gc[fin] - gp[fin]))) if fin.any() else 0.0
        same = np.array_equal(gc <= cfg.d, gp <= cfg.d)
        print(f" speedup: {tp / tc:.1f}x, max gap difference {diff:.1e}, "
              f"identical indicators: {same}")
    else:
        print("compiled extension not built; only the numpy kernel was timed")


if __name__ == "__main__":
    main()
