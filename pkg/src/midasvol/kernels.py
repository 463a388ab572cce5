"""Hot numeric kernels.

Every kernel exists as a plain loop (compiled with numba when available) and,
where the computation allows it, a vectorised numpy/scipy twin. The public
names at the bottom of the module are bound to one or the other according to
:data:`midasvol._accel.USE_NUMBA`. Both variants stay importable so tests and
the benchmark can compare them directly.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import lfilter

from ._accel import USE_NUMBA, njit

LOG_2PI = math.log(2.0 * math.pi)


# --------------------------------------------------------------------------
# short-run GJR-GARCH(1,1) recursion
# --------------------------------------------------------------------------

def _gjr_filter_loop(r, tau, mu, alpha, beta, gamma, g0, demeaned):
    n = r.shape[0]
    g = np.empty(n)
    if n == 0:
        return g
    intercept = 1.0 - alpha - beta - 0.5 * gamma
    g[0] = g0
    for d in range(1, n):
        e = r[d - 1] - mu
        neg = (e < 0.0) if demeaned else (r[d - 1] < 0.0)
        coef = alpha + gamma if neg else alpha
        g[d] = intercept + coef * e * e / tau[d] + beta * g[d - 1]
    return g


def _gjr_filter_numpy(r, tau, mu, alpha, beta, gamma, g0, demeaned):
    r = np.asarray(r, dtype=float)
    n = r.shape[0]
    g = np.empty(n)
    if n == 0:
        return g
    g[0] = g0
    if n == 1:
        return g
    e = r[:-1] - mu
    neg = e < 0.0 if demeaned else r[:-1] < 0.0
    coef = alpha + gamma * neg
    drive = (1.0 - alpha - beta - 0.5 * gamma) + coef * e * e / tau[1:]
    g[1:], _ = lfilter([1.0], [1.0, -beta], drive, zi=[beta * g0])
    return g


def _gjr_loglik_loop(r, tau, mu, alpha, beta, gamma, g0, demeaned):
    """Gaussian log-likelihood of days 1..n-1; day 0 only seeds the recursion.

    Returns ``(llf, bad)`` where ``bad`` is the first day with a non-finite
    or non-positive variance, or -1.
    """
    n = r.shape[0]
    intercept = 1.0 - alpha - beta - 0.5 * gamma
    g_prev = g0
    total = 0.0
    for d in range(1, n):
        e = r[d - 1] - mu
        neg = (e < 0.0) if demeaned else (r[d - 1] < 0.0)
        coef = alpha + gamma if neg else alpha
        g = intercept + coef * e * e / tau[d] + beta * g_prev
        s2 = tau[d] * g
        if not (s2 > 0.0) or not math.isfinite(s2):
            return math.nan, d
        u = r[d] - mu
        total += LOG_2PI + math.log(s2) + u * u / s2
        g_prev = g
    return -0.5 * total, -1


def _gjr_loglik_numpy(r, tau, mu, alpha, beta, gamma, g0, demeaned):
    g = _gjr_filter_numpy(r, tau, mu, alpha, beta, gamma, g0, demeaned)
    s2 = tau[1:] * g[1:]
    bad = np.flatnonzero(~(np.isfinite(s2) & (s2 > 0.0)))
    if bad.size:
        return math.nan, int(bad[0]) + 1
    u = r[1:] - mu
    return -0.5 * float(np.sum(LOG_2PI + np.log(s2) + u * u / s2)), -1


# --------------------------------------------------------------------------
# MIDAS lag filter and rolling windows
# --------------------------------------------------------------------------

def _lag_filter_loop(x, weights, start, stop, spacing):
    """``out[i - start] = sum_k weights[k-1] * x[i - k*spacing]`` for i in [start, stop)."""
    K = weights.shape[0]
    out = np.empty(stop - start)
    for i in range(start, stop):
        acc = 0.0
        for k in range(1, K + 1):
            acc += weights[k - 1] * x[i - k * spacing]
        out[i - start] = acc
    return out


def _lag_filter_numpy(x, weights, start, stop, spacing):
    out = np.zeros(stop - start)
    for k in range(1, weights.shape[0] + 1):
        lo = start - k * spacing
        out += weights[k - 1] * x[lo:lo + (stop - start)]
    return out


def _trailing_sum_loop(x, window):
    """``out[i] = sum_{j=1..window} x[i-j]`` for i >= window, NaN before."""
    n = x.shape[0]
    out = np.full(n, np.nan)
    for i in range(window, n):
        acc = 0.0
        for j in range(1, window + 1):
            acc += x[i - j]
        out[i] = acc
    return out


def _trailing_sum_numpy(x, window):
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape[0], np.nan)
    if x.shape[0] > window:
        out[window:] = sliding_window_view(x[:-1], window).sum(axis=1)
    return out


# --------------------------------------------------------------------------
# data-generating process
# --------------------------------------------------------------------------

def _simulate_loop(eps, mv_month, month_start, pre_months, mu, alpha, beta, gamma,
                   m, theta_rv, theta_mv, w_rv, w_mv, rolling, window, spacing,
                   demeaned, limit):
    """Serial GJR-GARCH-MIDAS simulation with causal RV feedback.

    ``month_start`` holds the first day index of every month plus a final
    sentinel equal to the number of days. Months before ``pre_months`` use
    tau = exp(m). Returns ``(r, tau, g, status)`` with ``status`` the first
    exploding day or -1.
    """
    n = eps.shape[0]
    n_months = month_start.shape[0] - 1
    K = w_rv.shape[0]
    r = np.zeros(n)
    tau = np.zeros(n)
    g = np.zeros(n)
    rv_month = np.zeros(n_months)
    rv_roll = np.zeros(n)
    mv_roll = np.zeros(n)
    mv_day = np.empty(n)
    for t in range(n_months):
        for d in range(month_start[t], month_start[t + 1]):
            mv_day[d] = mv_month[t]
    pre_days = month_start[pre_months]
    intercept = 1.0 - alpha - beta - 0.5 * gamma
    for t in range(n_months):
        log_tau_month = m
        if not rolling and t >= pre_months:
            acc_rv = 0.0
            acc_mv = 0.0
            for k in range(1, K + 1):
                acc_rv += w_rv[k - 1] * rv_month[t - k]
                acc_mv += w_mv[k - 1] * mv_month[t - k]
            log_tau_month = m + theta_rv * acc_rv + theta_mv * acc_mv
        rv_acc = 0.0
        for d in range(month_start[t], month_start[t + 1]):
            if rolling:
                if d >= window:
                    s = 0.0
                    q = 0.0
                    for j in range(1, window + 1):
                        s += r[d - j] * r[d - j]
                        q += mv_day[d - j]
                    rv_roll[d] = s
                    mv_roll[d] = q / window
                if d >= pre_days:
                    acc_rv = 0.0
                    acc_mv = 0.0
                    for k in range(1, K + 1):
                        acc_rv += w_rv[k - 1] * rv_roll[d - k * spacing]
                        acc_mv += w_mv[k - 1] * mv_roll[d - k * spacing]
                    tau[d] = math.exp(m + theta_rv * acc_rv + theta_mv * acc_mv)
                else:
                    tau[d] = math.exp(m)
            else:
                tau[d] = math.exp(log_tau_month)
            if d == 0:
                g[d] = 1.0
            else:
                e = r[d - 1] - mu
                neg = (e < 0.0) if demeaned else (r[d - 1] < 0.0)
                coef = alpha + gamma if neg else alpha
                g[d] = intercept + coef * e * e / tau[d] + beta * g[d - 1]
            s2 = tau[d] * g[d]
            if not (s2 <= limit) or not (s2 > 0.0):
                return r, tau, g, d
            r[d] = mu + math.sqrt(s2) * eps[d]
            rv_acc += r[d] * r[d]
        rv_month[t] = rv_acc
    return r, tau, g, -1


# --------------------------------------------------------------------------
# bindings
# --------------------------------------------------------------------------

gjr_filter_jit = njit(_gjr_filter_loop)
gjr_loglik_jit = njit(_gjr_loglik_loop)
lag_filter_jit = njit(_lag_filter_loop)
trailing_sum_jit = njit(_trailing_sum_loop)
simulate_jit = njit(_simulate_loop)

gjr_filter_numpy = _gjr_filter_numpy
gjr_loglik_numpy = _gjr_loglik_numpy
lag_filter_numpy = _lag_filter_numpy
trailing_sum_numpy = _trailing_sum_numpy

if USE_NUMBA:
    gjr_filter = gjr_filter_jit
    gjr_loglik = gjr_loglik_jit
    lag_filter = lag_filter_jit
    trailing_sum = trailing_sum_jit
else:
    gjr_filter = _gjr_filter_numpy
    gjr_loglik = _gjr_loglik_numpy
    lag_filter = _lag_filter_numpy
    trailing_sum = _trailing_sum_numpy

# The simulation recursion is nonlinear in its own output; there is no
# vectorised form, so the fallback is the plain loop.
simulate = simulate_jit
