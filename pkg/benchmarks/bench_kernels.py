"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--samples 200000]

Both paths are imported in one process; the jitted versions are warmed up
before timing so compilation is excluded. With UNSHARP_DISABLE_NUMBA set only
the fallback column is reported.
"""

import argparse
import timeit

import numpy as np

from unsharp import kernels
from unsharp._jit import NUMBA_ENABLED
from unsharp.compat import SolverConfig, marginal_constraints, problem_for_axes
from unsharp.moments import trine_axes
from unsharp.povm import X, Z


def dykstra_args(axes, eta):
    cfg = SolverConfig()
    proj, offset = marginal_constraints(problem_for_axes(axes, eta)).projector()
    m = 2 ** len(axes)
    x0 = np.zeros(4 * m)
    x0[0::4] = 1.0 / m
    return proj, offset, x0, cfg.max_iter, cfg.tol_feas, cfg.tol_infeas, cfg.stall_tol, cfg.stall_window


def cases(samples):
    rng = np.random.default_rng(0)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    herm = (g + g.conj().T) / 2
    cdf = np.array([0.125, 0.5, 0.875, 1.0])
    state = np.uint64(kernels.splitmix64(1))
    return [
        ("dykstra pair eta=0.75", kernels.dykstra_numba, kernels.dykstra_numpy, dykstra_args((X, Z), 0.75)),
        ("dykstra trine eta=0.66", kernels.dykstra_numba, kernels.dykstra_numpy, dykstra_args(trine_axes(), 0.66)),
        ("jacobi 4x4", kernels.jacobi_numba, kernels.jacobi_numpy, (herm, 1e-14, 100)),
        (f"sampler n={samples}", kernels.sample_numba, kernels.sample_python, (cdf, samples, state)),
    ]


def best_of(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 10**5:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--samples", type=int, default=200_000)
    args = parser.parse_args(argv)

    print(f"{'kernel':<26}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, fast, slow, fargs in cases(args.samples):
        t_slow = best_of(slow, fargs, args.repeat)
        if NUMBA_ENABLED:
            fast(*fargs)  # compile outside the timed region
            t_fast = best_of(fast, fargs, args.repeat)
            print(f"{name:<26}{t_fast * 1e3:>10.3f}ms{t_slow * 1e3:>10.3f}ms{t_slow / t_fast:>9.1f}x")
        else:
            print(f"{name:<26}{'-':>12}{t_slow * 1e3:>10.3f}ms{'-':>10}")


if __name__ == "__main__":
    main()
