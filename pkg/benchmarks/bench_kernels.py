"""Time the numba kernels against their pure-numpy fallbacks.

Run with `python benchmarks/bench_kernels.py`.  The dispatch used by the
package follows QVIKIT_DISABLE_NUMBA; this script always times both
implementations directly.
"""

import time

import numpy as np

from qvikit import kernels
from qvikit.verify import shifted_square_problem


def timeit(fn, *args, repeats=5):
    fn(*args)  # warmup (triggers JIT compilation on the numba path)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    n = 200_000
    d = 2
    Z = rng.normal(scale=10.0, size=(n, d))
    lo = np.zeros(d)
    up = np.ones(d)
    A = rng.normal(size=(n, d))
    B = rng.normal(size=(n, d))

    prob = shifted_square_problem()
    C = prob.C
    Zs = rng.normal(scale=3.0, size=(20_000, d))

    Z4 = rng.normal(scale=3.0, size=(2_000, 4))
    lo4 = -np.ones(4)
    up4 = np.ones(4)
    G4 = np.array([[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 0.0, 0.0]])
    h4 = np.array([1.0, -0.5])

    cases = [
        ("box_project_batch (200k x 2)",
         kernels.box_project_batch_numpy, kernels.box_project_batch_numba,
         (Z, lo, up)),
        ("segment_project_batch (200k x 2)",
         kernels.segment_project_batch_numpy,
         kernels.segment_project_batch_numba, (A, B, Z)),
        ("polytope_project_batch (20k x 2, 26 candidates)",
         kernels.polytope_project_batch_numpy,
         kernels.polytope_project_batch_numba,
         (Zs, C._mats, C._offs, C._G, C._h, 1e-9)),
        ("dykstra_project_batch (2k x 4)",
         kernels.dykstra_project_batch_numpy,
         kernels.dykstra_project_batch_numba,
         (Z4, lo4, up4, True, G4, h4, 1e-12, 100_000)),
    ]

    print(f"active dispatch backend: {kernels.BACKEND}")
    print(f"{'kernel':<48} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, f_np, f_nb, args in cases:
        t_np = timeit(f_np, *args)
        if f_nb is None:
            print(f"{name:<48} {t_np:>10.4f} {'n/a':>10} {'n/a':>8}")
            continue
        t_nb = timeit(f_nb, *args)
        print(f"{name:<48} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
