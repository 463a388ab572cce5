"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--days 10000] [--repeat 7] [--fit]

Each kernel is called once before timing so JIT compilation is excluded.
With ``--fit`` an end-to-end fit is also timed in two subprocesses, one with
``MIDASVOL_DISABLE_NUMBA=1``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from midasvol import kernels
from midasvol._accel import NUMBA_AVAILABLE
from midasvol.midas import beta_weights_restricted

FIT_SNIPPET = """
import time
from midasvol import DgpConfig, ModelSpec, ParamSet, simulate_panel, prepare_data, fit, OptimOptions, backend
spec = ModelSpec(drivers="mv", span="fixed", K=36)
p = ParamSet(0.0, 0.05, 0.90, 0.04, 0.1, theta_mv=0.3, omega2_mv=5.0)
sim = simulate_panel(DgpConfig(p, spec, months=480, seed=1))
data = prepare_data(sim.panel, spec, sim.mv)
fit(data, OptimOptions(restarts=1), compute_std_errors=False)
t = time.perf_counter()
fit(data, OptimOptions(restarts=4), compute_std_errors=False)
print(backend(), time.perf_counter() - t)
"""


def best_of(fn, repeat: int) -> float:
    fn()
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--days", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--fit", action="store_true", help="also time a full fit under each backend")
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        sys.exit("numba is not importable (or MIDASVOL_DISABLE_NUMBA is set); nothing to compare")

    rng = np.random.default_rng(0)
    n = args.days
    r = rng.standard_normal(n)
    tau = np.exp(0.2 * rng.standard_normal(n))
    gjr = (r, tau, 0.0, 0.05, 0.9, 0.04, 1.0, False)
    w = np.ascontiguousarray(beta_weights_restricted(36, 5.0).weights)
    rv = np.ascontiguousarray(kernels.trailing_sum_numpy(r * r, 22))
    lag = (rv, w, 22 + 36, n, 1)

    cases = [
        ("gjr_filter", kernels.gjr_filter_jit, kernels.gjr_filter_numpy, gjr),
        ("gjr_loglik", kernels.gjr_loglik_jit, kernels.gjr_loglik_numpy, gjr),
        ("lag_filter K=36", kernels.lag_filter_jit, kernels.lag_filter_numpy, lag),
        ("trailing_sum N=22", kernels.trailing_sum_jit, kernels.trailing_sum_numpy, (r * r, 22)),
    ]
    print(f"{'kernel':<20} {'numba':>12} {'numpy':>12} {'speedup':>8}   (n = {n} days)")
    for name, fast, slow, a in cases:
        tf = best_of(lambda: fast(*a), args.repeat)
        ts = best_of(lambda: slow(*a), args.repeat)
        print(f"{name:<20} {tf * 1e6:10.1f}us {ts * 1e6:10.1f}us {ts / tf:7.1f}x")

    if args.fit:
        for flag in ("0", "1"):
            env = dict(os.environ, MIDASVOL_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", FIT_SNIPPET], env=env, capture_output=True,
                                 text=True, check=True)
            name, secs = out.stdout.split()
            print(f"fit (4 restarts, 480 months) backend={name:<6} {float(secs):8.2f}s")


if __name__ == "__main__":
    main()
