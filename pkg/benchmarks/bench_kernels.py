"""Compare the numba and numpy kernel backends on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Each kernel runs on both backends with the same arrays; outputs are checked
for exact equality before timings (best of ``--repeat``) are printed.
"""
import argparse
import time

import numpy as np

from tvaudit import _kernels


def best_time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(scale, rng):
    n_bins = 96
    p = np.exp(-0.5 * ((np.arange(n_bins) - 50) / 15.0) ** 2)
    cdf = np.cumsum(p) / p.sum()
    rows = max(1, int(20_000 * scale))
    counts = rng.integers(0, 10_000, size=(rows, n_bins)).astype(np.int64)
    js = np.arange(1, rows, dtype=np.int64)
    return {
        f"dtv_rows       {rows}x{n_bins}": ("dtv_rows", (counts,)),
        f"categorical    {int(2e6 * scale)} draws": (
            "categorical_counts", (cdf, rng.random(int(2e6 * scale)))),
        f"resample_dtvs  {int(2e4 * scale)}x50": (
            "resample_dtvs", (cdf, rng.random((int(2e4 * scale), 50)))),
        f"min_sums       1 vs {rows - 1}": ("min_sums", (counts, 0, js)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply problem sizes")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend is available")
        return 1
    _kernels.warmup()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<32} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for label, (name, fargs) in cases(args.scale, rng).items():
        t_np, out_np = best_time(getattr(_kernels, f"{name}_numpy"), fargs, args.repeat)
        t_nb, out_nb = best_time(getattr(_kernels, f"{name}_numba"), fargs, args.repeat)
        if not np.array_equal(out_np, out_nb):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{label:<32} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
