"""Benchmark the least-squares kernel backends.

Runs the column-pivoted Householder QR on identical problems through
the numba JIT kernel and the vectorized numpy fallback, with
numpy.linalg.lstsq (LAPACK SVD) as an external reference point, and
checks the backends agree numerically.

Usage:
    python benchmarks/bench_solver.py [--repeat 20]
"""

import argparse
import time

import numpy as np

from zoneval._kernels import _qr_pivot_loops, _qr_pivot_numpy

try:
    from numba import njit

    _qr_pivot_numba = njit(cache=True)(_qr_pivot_loops)
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    print("numba not installed; benchmarking the numpy fallback only")

# (rows, cols): assessor-scale, bulk-county-scale, wide-model
SHAPES = [(12_475, 14), (100_000, 14), (20_000, 60)]


def make_problem(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    X[:, 0] = 1.0
    y = X @ rng.standard_normal(p) + rng.standard_normal(n)
    return X, y


def time_backend(fn, X, y, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        # production copies column-major; see qr_pivot_decompose
        a, qty = np.array(X, order="F", copy=True), y.copy()
        start = time.perf_counter()
        jpvt, qraux = fn(a, qty)
        best = min(best, time.perf_counter() - start)
        out = (a, qty, jpvt)
    return best, out


def solve_from_factorization(a, qty, jpvt, p):
    import scipy.linalg

    r = np.triu(a[:p, :p])
    beta = np.empty(p)
    beta[jpvt] = scipy.linalg.solve_triangular(r, qty[:p], lower=False)
    return beta


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=20, help="timing repetitions (best-of)")
    args = parser.parse_args()

    if HAS_NUMBA:
        print("warming up the JIT kernel...")
        Xw, yw = make_problem(64, 4, 0)
        _qr_pivot_numba(np.array(Xw, order="F"), yw.copy())

    header = f"{'shape':>14} {'numpy (ms)':>12} {'numba (ms)':>12} {'lstsq (ms)':>12} {'speedup':>9} {'max |dbeta|':>12}"
    print(header)
    print("-" * len(header))

    for n, p in SHAPES:
        X, y = make_problem(n, p, seed=42)

        t_np, (a_np, q_np, j_np) = time_backend(_qr_pivot_numpy, X, y, args.repeat)
        beta_np = solve_from_factorization(a_np, q_np, j_np, p)

        if HAS_NUMBA:
            t_nb, (a_nb, q_nb, j_nb) = time_backend(_qr_pivot_numba, X, y, args.repeat)
            beta_nb = solve_from_factorization(a_nb, q_nb, j_nb, p)
            dbeta = float(np.max(np.abs(beta_np - beta_nb)))
            speedup = t_np / t_nb
        else:
            t_nb, dbeta, speedup = float("nan"), float("nan"), float("nan")

        start = time.perf_counter()
        beta_ref = np.linalg.lstsq(X, y, rcond=None)[0]
        t_ref = time.perf_counter() - start

        dref = float(np.max(np.abs(beta_np - beta_ref)))
        print(
            f"{n:>8} x {p:<3} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {1e3 * t_ref:12.2f} "
            f"{speedup:8.2f}x {max(dbeta, dref):12.2e}"
        )


if __name__ == "__main__":
    main()
