import os
import runpy
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from tvaudit import _kernels as k

needs_numba = pytest.mark.skipif(not k.HAVE_NUMBA, reason="numba not installed")


@needs_numba
def test_dtv_rows_backends_agree(rng):
    counts = rng.integers(0, 10_000, size=(200, 96)).astype(np.int64)
    np.testing.assert_array_equal(k.dtv_rows_numba(counts), k.dtv_rows_numpy(counts))


@needs_numba
@pytest.mark.parametrize("n_bins", [1, 2, 7, 96])
def test_categorical_counts_backends_agree(rng, n_bins):
    p = rng.random(n_bins)
    p[rng.random(n_bins) < 0.3] = 0.0
    p[-1] += 1e-3
    cdf = np.cumsum(p) / p.sum()
    u = rng.random(50_000)
    a = k.categorical_counts_numba(cdf, u)
    b = k.categorical_counts_numpy(cdf, u)
    np.testing.assert_array_equal(a, b)
    assert a.sum() == u.size
    assert np.all(a[p == 0] == 0)


@needs_numba
def test_resample_dtvs_backends_agree(rng):
    cdf = np.cumsum(np.full(96, 1 / 96))
    cdf /= cdf[-1]
    u = rng.random((300, 257))
    np.testing.assert_array_equal(k.resample_dtvs_numba(cdf, u), k.resample_dtvs_numpy(cdf, u))


@needs_numba
def test_min_sums_backends_agree(rng):
    counts = rng.integers(0, 50, size=(40, 96)).astype(np.int64)
    js = np.arange(5, 40, dtype=np.int64)
    np.testing.assert_array_equal(k.min_sums_numba(counts, 3, js), k.min_sums_numpy(counts, 3, js))


def test_zero_probability_bins_never_drawn():
    cdf = np.array([0.0, 0.5, 0.5, 1.0, 1.0])
    u = np.array([0.0, 0.25, 0.5, 0.75, np.nextafter(1.0, 0)])
    counts = k.categorical_counts(cdf, u)
    np.testing.assert_array_equal(counts, [0, 2, 0, 3, 0])


def _backend_in_subprocess(value):
    env = dict(os.environ, TVAUDIT_BACKEND=value)
    out = subprocess.run([sys.executable, "-c", "import tvaudit._kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True)
    return out


def test_env_flag_forces_numpy():
    out = _backend_in_subprocess("numpy")
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_default_backend_is_numba():
    assert _backend_in_subprocess("numba").stdout.strip() == "numba"


def test_bad_env_flag_rejected():
    out = _backend_in_subprocess("cuda")
    assert out.returncode != 0
    assert "TVAUDIT_BACKEND" in out.stderr


@pytest.mark.skipif(not k.HAVE_NUMBA, reason="numba not installed")
def test_benchmark_script_runs(capsys):
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    mod = runpy.run_path(str(path))
    assert mod["main"](["--repeat", "1", "--scale", "0.01"]) == 0
    assert "speedup" in capsys.readouterr().out
