"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from curvlab import _backend, core, metriclab
from curvlab._backend import _fallback


def jacobi_case(n):
    a = core.rng(n).standard_normal((n, n))
    a = np.ascontiguousarray(a + a.T)
    return lambda impl: impl.jacobi_eigh(a.copy(), 1e-15, 100)


def metric_jet_case(m):
    pm = metriclab.random_perturbation_metric(m, 0, degree=4)
    x = np.full(m, 0.1)
    args = (pm.exps, pm.coeffs, pm.rows, pm.cols, x, m)
    return lambda impl: impl.poly_metric_jet(*args)


def bench(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if _backend.BACKEND != "cython":
        print("compiled extension not available; only the fallback can be timed")
    cases = [(f"jacobi_eigh n={n}", jacobi_case(n)) for n in (6, 10, 21)]
    cases += [(f"poly_metric_jet m={m}", metric_jet_case(m)) for m in (3, 4, 5)]
    print(f"{'kernel':<24}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, case in cases:
        tp = bench(lambda: case(_fallback), args.repeat)
        if _backend.BACKEND == "cython":
            tc = bench(lambda: case(_backend), args.repeat)
            print(f"{name:<24}{tp * 1e6:>10.1f}us{tc * 1e6:>10.1f}us{tp / tc:>9.1f}x")
        else:
            print(f"{name:<24}{tp * 1e6:>10.1f}us{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
