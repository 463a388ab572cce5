import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from midasvol import kernels
from midasvol._accel import NUMBA_AVAILABLE, backend
from midasvol.midas import beta_weights_restricted

seeds = st.integers(0, 2 ** 32 - 1)


def _gjr_args(seed, n=400, demeaned=False):
    rng = np.random.default_rng(seed)
    r = rng.standard_normal(n) * 1.3 + 0.05
    tau = np.exp(0.3 * rng.standard_normal(n))
    return r, tau, 0.05, 0.06, 0.88, 0.05, 1.0, demeaned


@given(seeds, st.booleans())
def test_filters_agree(seed, demeaned):
    a = _gjr_args(seed, demeaned=demeaned)
    assert np.allclose(kernels.gjr_filter_jit(*a), kernels.gjr_filter_numpy(*a), rtol=1e-12, atol=0)


@given(seeds, st.booleans())
def test_likelihoods_agree(seed, demeaned):
    a = _gjr_args(seed, demeaned=demeaned)
    fast, slow = kernels.gjr_loglik_jit(*a), kernels.gjr_loglik_numpy(*a)
    assert fast[1] == slow[1] == -1
    assert fast[0] == pytest.approx(slow[0], rel=1e-12)


def test_likelihood_reports_first_bad_day():
    r, tau, *rest = _gjr_args(0, n=50)
    tau = tau.copy()
    tau[17] = -1.0
    for fn in (kernels.gjr_loglik_jit, kernels.gjr_loglik_numpy):
        llf, bad = fn(r, tau, *rest)
        assert np.isnan(llf) and bad == 17


@given(seeds, st.integers(1, 40), st.integers(1, 25), st.floats(1.0, 30.0))
def test_lag_filters_agree(seed, K, spacing, omega2):
    x = np.random.default_rng(seed).gamma(2.0, size=K * spacing + 300)
    w = np.ascontiguousarray(beta_weights_restricted(K, omega2).weights)
    start = K * spacing
    a = (x, w, start, x.size, spacing)
    assert np.allclose(kernels.lag_filter_jit(*a), kernels.lag_filter_numpy(*a), rtol=1e-12, atol=1e-12)


@given(seeds, st.integers(1, 30))
def test_trailing_sums_agree(seed, window):
    x = np.random.default_rng(seed).gamma(2.0, size=200)
    fast, slow = kernels.trailing_sum_jit(x, window), kernels.trailing_sum_numpy(x, window)
    assert np.array_equal(np.isnan(fast), np.isnan(slow))
    assert np.allclose(fast[window:], slow[window:], rtol=1e-12)
    assert np.isnan(fast[:window]).all()


def test_public_names_follow_backend():
    assert backend() == ("numba" if NUMBA_AVAILABLE else "numpy")
    expected = kernels.gjr_filter_jit if NUMBA_AVAILABLE else kernels.gjr_filter_numpy
    assert kernels.gjr_filter is expected


SNIPPET = """
import json
from midasvol import backend, ModelSpec, ParamSet, DgpConfig, simulate_panel, prepare_data, log_likelihood
spec = ModelSpec(drivers="rv+mv", span="rolling", K=12, window=22)
p = ParamSet(0.02, 0.06, 0.9, 0.04, 0.0, theta_rv=0.002, omega2_rv=4.0, theta_mv=0.3, omega2_mv=5.0)
sim = simulate_panel(DgpConfig(p, spec, months=80, seed=4))
print(json.dumps({"backend": backend(), "llf": log_likelihood(p, prepare_data(sim.panel, spec, sim.mv)),
                  "r": sim.panel.values[-5:].tolist()}))
"""


def _run(flag):
    env = dict(os.environ, MIDASVOL_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not importable")
def test_env_flag_switches_backend_without_changing_results():
    fast, slow = _run("0"), _run("1")
    assert fast["backend"] == "numba" and slow["backend"] == "numpy"
    assert fast["r"] == slow["r"]
    assert fast["llf"] == pytest.approx(slow["llf"], rel=1e-12)
