"""Timing comparison of the principal-curvature kernel backends.

Runs the batched curvature kernel on solver-sized workloads with both
the compiled node loop and the vectorized numpy fallback, checks that
they agree to roundoff, and prints a small table.  The same numpy path
is what the package uses when ``CURVEDUAL_NO_NUMBA`` is set or numba is
missing.

Usage::

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from curvedual import _kernels
from curvedual.spectral import build_grid


def make_batch(L_max, n_cols, seed=0):
    rng = np.random.default_rng(seed)
    grid = build_grid(L_max)
    N = grid.n_nodes
    R = np.pi / 4 + 0.02 * rng.standard_normal((N, n_cols))
    RT, RP = 0.05 * rng.standard_normal((2, N, n_cols))
    RTT, RTP, RPP = 0.05 * rng.standard_normal((3, N, n_cols))
    return grid.theta, grid.phi, R, RT, RP, RTT, RTP, RPP


def run_numba(args):
    theta, phi, R = args[0], args[1], args[2]
    K1 = np.empty(R.shape)
    K2 = np.empty(R.shape)
    _kernels._kappa_batch_jit(*(np.ascontiguousarray(a) for a in args),
                              K1, K2)
    return K1, K2


def best_of(fn, args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(L_max, n_cols):
    args = make_batch(L_max, n_cols)
    n_entries = args[2].size

    t_np, out_np = best_of(lambda a: _kernels._kappa_batch_numpy(*a), args)
    row = (f"L={L_max:<3d} cols={n_cols:<4d} "
           f"numpy {t_np * 1e3:8.2f} ms "
           f"({n_entries / t_np / 1e6:6.1f} Mnode/s)")

    if _kernels._HAVE_NUMBA:
        run_numba(args)  # compile outside the timed region
        t_nb, out_nb = best_of(run_numba, args)
        agree = max(np.max(np.abs(out_nb[0] - out_np[0])),
                    np.max(np.abs(out_nb[1] - out_np[1])))
        row += (f"   numba {t_nb * 1e3:8.2f} ms "
                f"({n_entries / t_nb / 1e6:6.1f} Mnode/s) "
                f"speedup {t_np / t_nb:5.2f}x  agree {agree:.2e}")
    else:
        row += "   numba unavailable"
    print(row)


def main():
    print(f"active backend: {_kernels.backend_name()}")
    # single-surface evaluations and Jacobian-sized batches at the
    # working truncations
    for L_max, n_cols in [(16, 1), (24, 1), (24, 128), (24, 651), (32, 651)]:
        bench(L_max, n_cols)


if __name__ == "__main__":
    main()
