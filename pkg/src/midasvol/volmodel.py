"""Long-run (MIDAS) and short-run (GJR-GARCH) variance components."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import kernels
from .errors import ConfigError, CoverageError, DomainError, LengthError, WindowError
from .midas import beta_weights_restricted
from .timeseries import MonthlySeries, ReturnPanel, realized_vol_monthly, rolling_macro_series, rolling_realized_vol

__all__ = [
    "ModelSpec",
    "ParamSet",
    "VariancePath",
    "ModelData",
    "prepare_data",
    "long_run_fixed",
    "long_run_rolling",
    "short_run_path",
    "conditional_variance",
    "tau_path",
    "variance_path",
]

DRIVERS = ("rv", "mv", "rv+mv")
SPANS = ("fixed", "rolling")


@dataclass(frozen=True)
class ModelSpec:
    """Which long-run drivers enter, how tau is spanned, and the lag geometry.

    ``lag_spacing`` only matters in rolling mode: ``"day"`` spaces the K
    rolling-window lags one trading day apart, ``"month"`` spaces them
    ``window`` days apart so consecutive windows do not overlap.
    ``indicator="demeaned"`` switches the asymmetry indicator from the raw
    return sign to the sign of ``r - mu``. ``likelihood_start`` (a flat day
    index) overrides the default burn-in so different specs can be scored on
    the same sample.
    """

    drivers: str = "rv"
    span: str = "fixed"
    K: int = 36
    window: int = 22
    lag_spacing: str = "day"
    indicator: str = "raw"
    likelihood_start: int | None = None

    def __post_init__(self):
        if self.drivers not in DRIVERS:
            raise ConfigError(f"drivers must be one of {DRIVERS}, got {self.drivers!r}")
        if self.span not in SPANS:
            raise ConfigError(f"span must be one of {SPANS}, got {self.span!r}")
        if self.lag_spacing not in ("day", "month"):
            raise ConfigError(f"lag_spacing must be 'day' or 'month', got {self.lag_spacing!r}")
        if self.indicator not in ("raw", "demeaned"):
            raise ConfigError(f"indicator must be 'raw' or 'demeaned', got {self.indicator!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError(f"K must be a positive integer, got {self.K}")
        if int(self.window) != self.window or self.window < 1:
            raise ConfigError(f"window must be a positive integer, got {self.window}")

    @property
    def uses_rv(self) -> bool:
        return self.drivers in ("rv", "rv+mv")

    @property
    def uses_mv(self) -> bool:
        return self.drivers in ("mv", "rv+mv")

    @property
    def spacing(self) -> int:
        return self.window if self.lag_spacing == "month" else 1

    @property
    def param_names(self) -> tuple[str, ...]:
        names = ["mu", "alpha", "beta", "gamma", "m"]
        if self.uses_rv:
            names += ["theta_rv", "omega2_rv"]
        if self.uses_mv:
            names += ["theta_mv", "omega2_mv"]
        return tuple(names)

    def min_start(self, panel: ReturnPanel) -> int:
        """First flat day index with a full lag history under this spec."""
        if self.span == "fixed":
            if panel.n_months <= self.K:
                raise WindowError(f"panel has {panel.n_months} months, fixed span needs more than K={self.K}",
                                  first_valid=self.K)
            return int(panel.starts[self.K])
        return self.window + self.K * self.spacing

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class ParamSet:
    mu: float
    alpha: float
    beta: float
    gamma: float
    m: float
    theta_rv: float | None = None
    omega2_rv: float | None = None
    theta_mv: float | None = None
    omega2_mv: float | None = None

    def validate(self, spec: ModelSpec | None = None) -> "ParamSet":
        vals = [v for v in self.as_dict().values()]
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite parameter in {self}")
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta >= 0.0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if not self.alpha + self.beta + 0.5 * self.gamma < 1.0:
            raise DomainError(f"alpha + beta + gamma/2 must be < 1, got {self.persistence}")
        if not self.alpha + self.gamma >= 0.0:
            raise DomainError(f"alpha + gamma must be >= 0, got {self.alpha + self.gamma}")
        for name in ("omega2_rv", "omega2_mv"):
            w = getattr(self, name)
            if w is not None and not w >= 1.0:
                raise DomainError(f"{name} must be >= 1, got {w}")
        if spec is not None:
            for name in spec.param_names:
                if getattr(self, name) is None:
                    raise DomainError(f"spec {spec.drivers!r} needs parameter {name}")
        return self

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta + 0.5 * self.gamma

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    def vector(self, names) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)

    @classmethod
    def from_vector(cls, names, values) -> "ParamSet":
        return cls(**{n: float(v) for n, v in zip(names, values)})

    def with_(self, **kw) -> "ParamSet":
        return replace(self, **kw)


@dataclass(frozen=True)
class VariancePath:
    tau: np.ndarray
    g: np.ndarray
    sigma2: np.ndarray
    dates: np.ndarray | None = None
    month_id: np.ndarray | None = None

    def __len__(self) -> int:
        return self.tau.shape[0]


# --------------------------------------------------------------------------
# components
# --------------------------------------------------------------------------

def _weights(K, omega2):
    return np.ascontiguousarray(beta_weights_restricted(K, omega2).weights)


def _midas_sum(x, K, omega2, start, stop, spacing):
    return kernels.lag_filter(np.ascontiguousarray(x, dtype=float), _weights(K, omega2), start, stop, spacing)


def _log_tau(params, spec, rv, mv, start, stop, spacing):
    log_tau = np.full(stop - start, params.m)
    if spec.uses_rv and params.theta_rv != 0.0:
        log_tau += params.theta_rv * _midas_sum(rv, spec.K, params.omega2_rv, start, stop, spacing)
    if spec.uses_mv and params.theta_mv != 0.0:
        log_tau += params.theta_mv * _midas_sum(mv, spec.K, params.omega2_mv, start, stop, spacing)
    return log_tau


def _check_driver(spec, rv, mv):
    if spec.uses_rv and rv is None:
        raise ConfigError("spec uses RV but no RV history was supplied")
    if spec.uses_mv and mv is None:
        raise ConfigError("spec uses a macro variable but none was supplied")
    n = len(rv) if spec.uses_rv else len(mv)
    if spec.uses_rv and spec.uses_mv and len(rv) != len(mv):
        raise LengthError("RV and macro histories differ in length")
    return n


def long_run_fixed(params: ParamSet, spec: ModelSpec, rv_lags=None, mv_lags=None, start: int | None = None) -> np.ndarray:
    """Monthly tau for months ``start..T-1`` of the driver histories.

    ``log tau_t = m + theta_rv * sum_k phi_k RV_{t-k} + theta_mv * sum_k phi_k MV_{t-k}``
    """
    n = _check_driver(spec, rv_lags, mv_lags)
    start = spec.K if start is None else start
    if start < spec.K:
        raise WindowError(f"month {start} has fewer than K={spec.K} months of history", first_valid=spec.K)
    return np.exp(_log_tau(params, spec, rv_lags, mv_lags, start, n, 1))


def long_run_rolling(params: ParamSet, spec: ModelSpec, rv_rolling=None, mv_rolling=None,
                     start: int | None = None) -> np.ndarray:
    """Daily tau for days ``start..n-1`` from trailing-window drivers.

    Lag k reads the driver ``k * spacing`` days back.
    """
    n = _check_driver(spec, rv_rolling, mv_rolling)
    first = spec.window + spec.K * spec.spacing
    start = first if start is None else start
    if start < first:
        raise WindowError(f"day {start} lacks {spec.K} lagged {spec.window}-day windows", first_valid=first)
    lo = start - spec.K * spec.spacing
    for x in (rv_rolling if spec.uses_rv else None, mv_rolling if spec.uses_mv else None):
        if x is not None and not np.all(np.isfinite(np.asarray(x)[lo:n - spec.spacing])):
            raise WindowError("rolling driver undefined inside the lag range", first_valid=first)
    return np.exp(_log_tau(params, spec, rv_rolling, mv_rolling, start, n, spec.spacing))


def short_run_path(params: ParamSet, returns, tau, g_init: float = 1.0, indicator: str = "raw") -> np.ndarray:
    """GJR-GARCH(1,1) short-run component with unit unconditional mean.

    ``g_i = (1 - a - b - c/2) + (a + c*1{r_{i-1}<0}) (r_{i-1} - mu)^2 / tau_i + b g_{i-1}``
    """
    r = np.ascontiguousarray(returns, dtype=float)
    tau = np.ascontiguousarray(tau, dtype=float)
    if r.shape != tau.shape:
        raise LengthError("returns and tau differ in length")
    if not np.all(tau > 0.0):
        raise DomainError("tau must be strictly positive")
    if not g_init > 0.0:
        raise DomainError("g_init must be positive")
    return kernels.gjr_filter(r, tau, params.mu, params.alpha, params.beta, params.gamma, float(g_init),
                              indicator == "demeaned")


def conditional_variance(tau, g, dates=None, month_id=None) -> VariancePath:
    tau = np.asarray(tau, dtype=float)
    g = np.asarray(g, dtype=float)
    if tau.shape != g.shape:
        raise LengthError("tau and g differ in length")
    return VariancePath(tau, g, tau * g, dates, month_id)


# --------------------------------------------------------------------------
# prepared estimation data
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelData:
    """Returns plus driver histories laid out for one spec.

    Fixed span: ``rv``/``mv`` are per month of the panel. Rolling span: they
    are per flat day, NaN until the first full window. ``start`` is the flat
    index of the day that seeds the short-run recursion; the likelihood
    covers ``start + 1 .. n - 1``.
    """

    panel: ReturnPanel
    spec: ModelSpec
    rv: np.ndarray | None
    mv: np.ndarray | None
    start: int
    returns: np.ndarray = field(repr=False)

    @property
    def n_obs(self) -> int:
        return self.panel.n_days - self.start - 1

    def sample_returns(self) -> np.ndarray:
        return self.returns[self.start:]


def prepare_data(panel: ReturnPanel, spec: ModelSpec, mv: MonthlySeries | None = None) -> ModelData:
    if spec.uses_mv and mv is None:
        raise ConfigError(f"drivers={spec.drivers!r} requires a macro series")
    mv_month = None
    if spec.uses_mv:
        off = int((panel.months[0] - mv.months[0]).astype(int))
        if off < 0 or off + panel.n_months > len(mv):
            missing = panel.months[0] if off < 0 else panel.months[min(panel.n_months - 1, len(mv) - off)]
            raise CoverageError(f"{mv.label or 'macro series'} does not cover {missing}")
        mv_month = np.asarray(mv.values[off:off + panel.n_months], dtype=float)
    if spec.span == "fixed":
        rv = realized_vol_monthly(panel) if spec.uses_rv else None
        mvx = mv_month
    else:
        rv = rolling_realized_vol(panel.values, spec.window) if spec.uses_rv else None
        mvx = rolling_macro_series(mv_month[panel.month_of_day], spec.window) if spec.uses_mv else None
    first = spec.min_start(panel)
    start = first if spec.likelihood_start is None else int(spec.likelihood_start)
    if start < first:
        raise WindowError(f"likelihood start {start} precedes the burn-in", first_valid=first)
    if start >= panel.n_days - 1:
        raise LengthError(f"no likelihood days left after burn-in ({panel.n_days} days, start {start})")
    return ModelData(panel, spec, rv, mvx, start, np.ascontiguousarray(panel.values))


def tau_path(params: ParamSet, data: ModelData) -> np.ndarray:
    """Per-day tau over the estimation sample ``start..n-1``."""
    spec, panel = data.spec, data.panel
    if spec.span == "fixed":
        t0 = int(panel.month_of_day[data.start])
        monthly = np.exp(_log_tau(params, spec, data.rv, data.mv, t0, panel.n_months, 1))
        return monthly[panel.month_of_day[data.start:] - t0]
    return np.exp(_log_tau(params, spec, data.rv, data.mv, data.start, panel.n_days, spec.spacing))


def variance_path(params: ParamSet, data: ModelData) -> VariancePath:
    params.validate(data.spec)
    tau = tau_path(params, data)
    g = short_run_path(params, data.sample_returns(), tau, 1.0, data.spec.indicator)
    panel = data.panel
    return conditional_variance(tau, g, panel.dates[data.start:], panel.month_of_day[data.start:])
