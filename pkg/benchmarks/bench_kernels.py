"""Time the numba kernels against their pure-numpy twins.

Runs every dual-backend kernel on a representative workload (the graph cloud
of a 2^16-point Brownian path) and prints per-kernel timings plus speedups.
Results are checked for exact agreement while timing.

Usage: python benchmarks/bench_kernels.py [--points 65537] [--repeat 3]
"""

import argparse
import time

import numpy as np

import fracdim as fd
from fracdim import kernels


def timed(fn, args, repeat):
    best = np.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def summarize(result):
    arr = np.asarray(result)
    return int(arr.sum()) if arr.ndim else int(arr)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=2**16 + 1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    grid = fd.TimeGrid.uniform(args.points)
    path = fd.generate_bm(grid, 1, 1)
    pts = np.column_stack([grid.times, path.bm_values[:, 0]])
    vals = path.bm_values[:, 0]
    eps = 2.0**-8

    sep = 2.0 * eps
    cells = kernels.cell_indices(pts, sep)
    keys, mins, widths, strides = kernels.pack_cells(cells)
    shifted = cells - mins
    sorted_keys, order = kernels._csr_bins(keys)
    good = np.ones(len(pts), dtype=bool)

    r = 2.0**-6
    cell = r / 4
    reach = int(np.ceil(r / cell)) + 1
    base = kernels.cell_indices(pts, cell)
    _, smins, swidths, sstrides = kernels.pack_cells(base, margin=reach)

    n_cols = 1 << 10
    step = (vals.size - 1) // n_cols

    box_cells = kernels.cell_indices(pts, eps)
    box_keys, _, _, _ = kernels.pack_cells(box_cells)

    cases = [
        ("greedy_pack", kernels._greedy_pack_nb, kernels._greedy_pack_np,
         (pts, shifted, widths, strides, sep * sep)),
        ("neighbor_counts", kernels._neighbor_counts_nb, kernels._neighbor_counts_np,
         (pts, shifted, widths, strides, sorted_keys, order, sep * sep)),
        ("thin_select", kernels._thin_select_nb, kernels._thin_select_np,
         (pts, shifted, widths, strides, sorted_keys, order, good, sep * sep)),
        ("sausage_occupancy", kernels._sausage_occupancy_nb, kernels._sausage_occupancy_np,
         (pts, base, smins, swidths, sstrides, cell, r * r, reach)),
        ("oscillation_counts", kernels._oscillation_counts_nb, kernels._oscillation_counts_np,
         (vals, n_cols, step, float(n_cols))),
        ("distinct_count", kernels._distinct_count_nb, kernels._distinct_count_np,
         (box_keys,)),
    ]

    print(f"workload: Brownian graph cloud, {args.points} points, eps=2^-8; "
          f"best of {args.repeat}")
    print(f"{'kernel':<20} {'numba':>10} {'numpy':>10} {'speedup':>8}  agree")
    for name, fn_nb, fn_np, call_args in cases:
        fn_nb(*call_args)  # compile before timing
        t_nb, res_nb = timed(fn_nb, call_args, args.repeat)
        t_np, res_np = timed(fn_np, call_args, args.repeat)
        agree = summarize(res_nb) == summarize(res_np)
        print(f"{name:<20} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms "
              f"{t_np / t_nb:>7.1f}x  {agree}")


if __name__ == "__main__":
    main()
