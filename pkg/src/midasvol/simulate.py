"""Seeded GJR-GARCH-MIDAS data-generating process.

Random numbers come from numpy's Philox4x64-10 counter-based bit generator
keyed directly by the 64-bit seed (no SeedSequence mixing). The stream is
consumed in a fixed order: ``P + T`` standard normals for the macro AR(1)
innovations, then ``(P + T) * N`` standard normals for the daily shocks,
where ``P`` is the number of pre-sample months and ``N`` the days per month.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError, NumericError
from .midas import beta_weights_restricted
from .timeseries import (
    DailySeries,
    MonthlySeries,
    ReturnPanel,
    to_month,
    write_columns,
    write_daily_csv,
    write_monthly_csv,
)
from .volmodel import ModelSpec, ParamSet, VariancePath, conditional_variance

__all__ = ["DgpConfig", "Simulation", "simulate_panel", "write_simulation"]

EXPLOSION_LIMIT = 1e12
MIN_PRESAMPLE_MONTHS = 48


@dataclass(frozen=True)
class DgpConfig:
    params: ParamSet
    spec: ModelSpec = field(default_factory=ModelSpec)
    months: int = 480
    days_per_month: int = 22
    mv_phi: float = 0.9
    mv_sd: float = 0.4
    mv_mean: float = 0.0
    seed: int = 0
    start_month: str = "2000-01"

    def __post_init__(self):
        try:
            self.params.validate(self.spec)
        except DomainError as exc:
            raise ConfigError(f"invalid parameters: {exc}") from None
        if self.months < self.spec.K + 24:
            raise ConfigError(f"months={self.months} must be at least K + 24 = {self.spec.K + 24}")
        if not abs(self.mv_phi) < 1.0:
            raise ConfigError(f"macro AR(1) coefficient must satisfy |phi| < 1, got {self.mv_phi}")
        if not self.mv_sd >= 0.0:
            raise ConfigError("macro innovation std must be non-negative")
        if not 1 <= self.days_per_month <= 28:
            raise ConfigError("days_per_month must lie in 1..28")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a non-negative 64-bit integer")

    @property
    def presample_months(self) -> int:
        s = self.spec
        need_days = s.window + s.K * s.spacing
        return max(MIN_PRESAMPLE_MONTHS, s.K, -(-need_days // self.days_per_month))


@dataclass(frozen=True)
class Simulation:
    panel: ReturnPanel
    mv: MonthlySeries
    truth: VariancePath
    config: DgpConfig


def _calendar(first_month: np.datetime64, n_months: int, days: int):
    months = first_month + np.arange(n_months)
    dates = (months.astype("datetime64[D]")[:, None] + np.arange(days)).ravel()
    return months, dates


def simulate_panel(config: DgpConfig) -> Simulation:
    """Draw one panel; returns it with the macro driver and the latent paths.

    Months before the output window use tau = exp(m) and only feed lag
    histories. The macro driver is returned on the scale that enters tau.
    """
    p, spec = config.params, config.spec
    pre, T, N = config.presample_months, config.months, config.days_per_month
    total = pre + T
    rng = np.random.Generator(np.random.Philox(key=config.seed))
    eta = rng.standard_normal(total)
    eps = rng.standard_normal(total * N)

    x = np.empty(total)
    x[0] = config.mv_mean + config.mv_sd / math.sqrt(1.0 - config.mv_phi ** 2) * eta[0]
    for t in range(1, total):
        x[t] = config.mv_mean + config.mv_phi * (x[t - 1] - config.mv_mean) + config.mv_sd * eta[t]

    zeros = np.zeros(spec.K)
    w_rv = np.ascontiguousarray(beta_weights_restricted(spec.K, p.omega2_rv).weights) if spec.uses_rv else zeros
    w_mv = np.ascontiguousarray(beta_weights_restricted(spec.K, p.omega2_mv).weights) if spec.uses_mv else zeros
    month_start = np.arange(total + 1, dtype=np.int64) * N
    r, tau, g, status = kernels.simulate(
        eps, x, month_start, pre, p.mu, p.alpha, p.beta, p.gamma, p.m,
        (p.theta_rv or 0.0) if spec.uses_rv else 0.0, (p.theta_mv or 0.0) if spec.uses_mv else 0.0,
        w_rv, w_mv, spec.span == "rolling", spec.window, spec.spacing, spec.indicator == "demeaned",
        EXPLOSION_LIMIT,
    )
    if status >= 0:
        raise NumericError("simulated variance exploded", int(status))

    first = to_month(config.start_month)
    months, dates = _calendar(first, T, N)
    keep = slice(pre * N, total * N)
    panel = ReturnPanel(months, np.full(T, N), dates, r[keep], label="simulated")
    mv = MonthlySeries(months, x[pre:], label="mv")
    truth = conditional_variance(tau[keep], g[keep], dates, panel.month_of_day)
    return Simulation(panel, mv, truth, config)


def write_simulation(sim: Simulation, out_dir, scale: float = 100.0, p0: float = 100.0) -> dict:
    """Write ``prices.csv``, ``returns.csv``, ``mv.csv`` and ``truth.csv``.

    Prices are ``p0 * exp(cumsum(r / scale))`` with ``p0`` dated the day before
    the first return, so reading them back with scaling ``scale`` recovers
    the simulated returns. ``mv.csv`` holds ``exp(driver)`` so the default
    log transform recovers the driver.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    panel = sim.panel
    logp = math.log(p0) + np.concatenate([[0.0], np.cumsum(panel.values / scale)])
    pdates = np.concatenate([[panel.dates[0] - np.timedelta64(1, "D")], panel.dates])
    paths = {
        "prices": out / "prices.csv",
        "returns": out / "returns.csv",
        "mv": out / "mv.csv",
        "truth": out / "truth.csv",
    }
    write_daily_csv(paths["prices"], DailySeries(pdates, np.exp(logp), "prices"))
    write_daily_csv(paths["returns"], DailySeries(panel.dates, panel.values, "returns"))
    write_monthly_csv(paths["mv"], MonthlySeries(sim.mv.months, np.exp(sim.mv.values), "mv"))
    write_columns(paths["truth"], ("date", "tau", "g", "sigma2"),
                  (panel.dates.astype(str), sim.truth.tau, sim.truth.g, sim.truth.sigma2))
    return paths
