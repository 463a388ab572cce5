"""Quasi-maximum-likelihood estimation of GJR-GARCH-MIDAS specifications."""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from ._accel import backend
from .errors import ConfigError, ConvergenceError, DomainError, LengthError, NumericError, ZeroVarianceError
from .volmodel import ModelData, ModelSpec, ParamSet, VariancePath, tau_path, variance_path

__all__ = [
    "OptimOptions",
    "Convergence",
    "FitResult",
    "log_likelihood",
    "fit",
    "std_errors",
    "information_criteria",
    "variance_ratio",
    "transform_params",
    "untransform_params",
    "SCHEMA_VERSION",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OMEGA2_GUARD = 300.0
MIN_LIKELIHOOD_DAYS = 100
_PENALTY = 1e300


@dataclass(frozen=True)
class OptimOptions:
    restarts: int = 8
    max_iterations: int = 2000
    tolerance: float = 1e-8
    xtol: float = 1e-6
    seed: int = 0
    jitter: float = 0.5
    polish: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or not self.tolerance > 0 or self.workers < 1:
            raise ConfigError("optimizer options must be positive")


@dataclass(frozen=True)
class Convergence:
    iterations: int
    function_evals: int
    gradient_norm: float
    restarts_used: int
    converged: bool
    best_restart: int
    restart_llf: tuple[float, ...] = ()
    restart_initial_llf: tuple[float, ...] = ()
    polished: bool = False

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "function_evals": self.function_evals,
            "gradient_norm": self.gradient_norm,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "best_restart": self.best_restart,
            "polished": self.polished,
            "restart_llf": list(self.restart_llf),
            "restart_initial_llf": list(self.restart_initial_llf),
        }


@dataclass(frozen=True)
class FitResult:
    params: ParamSet
    std_errors: dict
    llf: float
    aic: float
    bic: float
    variance_ratio: float
    path: VariancePath
    convergence: Convergence
    n_obs: int
    k: int
    spec: ModelSpec
    fixed: dict = field(default_factory=dict)

    def to_dict(self, include_paths: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "model": self.spec.as_dict(),
            "params": self.params.as_dict(),
            "fixed_params": dict(self.fixed),
            "std_errors": {k: (None if v is None else v) for k, v in self.std_errors.items()},
            "llf": self.llf,
            "aic": self.aic,
            "bic": self.bic,
            "variance_ratio": self.variance_ratio,
            "variance_ratio_pct": 100.0 * self.variance_ratio,
            "n_obs": self.n_obs,
            "k": self.k,
            "convergence": self.convergence.as_dict(),
        }
        if include_paths:
            out["paths"] = {
                "date": [str(d) for d in self.path.dates],
                "tau": self.path.tau.tolist(),
                "g": self.path.g.tolist(),
                "sigma2": self.path.sigma2.tolist(),
            }
        return out


# --------------------------------------------------------------------------
# parameter transform
# --------------------------------------------------------------------------
#
# (alpha, beta, gamma) live in {alpha > 0, beta > 0, alpha + gamma > 0,
# alpha + beta + gamma/2 < 1}. With x = (alpha/2, (alpha+gamma)/2, beta) the
# set is the open unit simplex corner {x > 0, sum x < 1}; sum x equals the
# persistence. x = logistic(u) * softmax(z1, z2, 0).

def _logistic(u):
    return 1.0 / (1.0 + math.exp(-u)) if u >= 0 else math.exp(u) / (1.0 + math.exp(u))


def transform_params(params: ParamSet, names=None) -> np.ndarray:
    """Map a ParamSet in the open constraint set to an unconstrained vector.

    Vector layout follows ``names`` (default: all present parameters in
    canonical order) with (alpha, beta, gamma) replaced by (u, z1, z2) and
    each omega2 by ``log(omega2 - 1)``.
    """
    names = names or tuple(params.as_dict())
    a, b, c = params.alpha, params.beta, params.gamma
    x = np.array([0.5 * a, 0.5 * (a + c), b])
    s = float(x.sum())
    if not (np.all(x > 0.0) and s < 1.0):
        raise DomainError(f"(alpha, beta, gamma) = ({a}, {b}, {c}) is on or outside the constraint boundary")
    z1, z2 = math.log(x[0] / x[2]), math.log(x[1] / x[2])
    u = math.log(s) - math.log1p(-s)
    out = []
    for n in names:
        v = getattr(params, n)
        if n == "alpha":
            out.append(u)
        elif n == "beta":
            out.append(z1)
        elif n == "gamma":
            out.append(z2)
        elif n.startswith("omega2"):
            if not v > 1.0:
                raise DomainError(f"{n} = {v} is on the boundary omega2 = 1")
            out.append(math.log(v - 1.0))
        else:
            out.append(float(v))
    return np.array(out)


def untransform_params(vector, names) -> ParamSet:
    vals = dict(zip(names, (float(v) for v in vector)))
    u, z1, z2 = vals["alpha"], vals["beta"], vals["gamma"]
    s = _logistic(u)
    zmax = max(z1, z2, 0.0)
    e = np.exp(np.array([z1, z2, 0.0]) - zmax)
    p = e / e.sum()
    alpha = 2.0 * s * float(p[0])
    vals["alpha"] = alpha
    vals["gamma"] = 2.0 * s * float(p[1]) - alpha
    vals["beta"] = s * float(p[2])
    for n in names:
        if n.startswith("omega2"):
            vals[n] = 1.0 + math.exp(vals[n])
    return ParamSet(**vals)


# --------------------------------------------------------------------------
# likelihood
# --------------------------------------------------------------------------

def log_likelihood(params: ParamSet, data: ModelData) -> float:
    """Gaussian log-likelihood over the post-burn-in sample.

    Day ``data.start`` seeds the short-run recursion with g = 1 and is not
    scored.
    """
    params.validate(data.spec)
    tau = tau_path(params, data)
    bad = np.flatnonzero(~(np.isfinite(tau) & (tau > 0.0)))
    if bad.size:
        raise NumericError("long-run component is not finite and positive", data.start + int(bad[0]))
    llf, bad_day = kernels.gjr_loglik(data.sample_returns(), tau, params.mu, params.alpha, params.beta,
                                      params.gamma, 1.0, data.spec.indicator == "demeaned")
    if bad_day >= 0:
        raise NumericError("conditional variance is not finite and positive", data.start + int(bad_day))
    if not math.isfinite(llf):
        raise NumericError("log-likelihood is not finite")
    return float(llf)


def information_criteria(llf: float, k: int, n: int) -> tuple[float, float]:
    if n < 1 or k < 1:
        raise DomainError("information criteria need n >= 1 and k >= 1")
    return 2.0 * k - 2.0 * llf, k * math.log(n) - 2.0 * llf


def _var(x):
    x = np.asarray(x, dtype=float)
    if x.size and np.ptp(x) == 0.0:
        return 0.0
    return float(np.var(x))


def variance_ratio(tau, g, spec: ModelSpec, month_id=None) -> float:
    """Share of the variance of log(tau * g) carried by log(tau).

    Fixed span aggregates g as its within-month sum and works over months;
    rolling span works over days. Returns 0 when the denominator vanishes.
    """
    tau = np.asarray(tau, dtype=float)
    g = np.asarray(g, dtype=float)
    if tau.shape != g.shape:
        raise LengthError("tau and g differ in length")
    if np.any(tau <= 0.0) or np.any(g <= 0.0):
        raise DomainError("variance components must be positive")
    if spec.span == "fixed":
        if month_id is None:
            raise ConfigError("fixed-span variance ratio needs the month of every day")
        month_id = np.asarray(month_id)
        cut = np.flatnonzero(np.diff(month_id)) + 1
        first = np.concatenate([[0], cut])
        tau_u = tau[first]
        g_u = np.add.reduceat(g, first)
    else:
        tau_u, g_u = tau, g
    if tau_u.shape[0] < 2:
        raise ZeroVarianceError("variance ratio needs at least two aggregation units")
    num = _var(np.log(tau_u))
    if num == 0.0:
        return 0.0
    den = _var(np.log(tau_u) + np.log(g_u))
    return 0.0 if den == 0.0 else num / den


# --------------------------------------------------------------------------
# fitting
# --------------------------------------------------------------------------

class _Objective:
    """-LLF over the free coordinates of the transformed parameter vector."""

    def __init__(self, data: ModelData, names, free, fixed: dict):
        self.data = data
        self.names = names
        self.free = free
        self.fixed = fixed
        self.template = np.zeros(len(names))
        self.free_idx = [names.index(n) for n in free]
        self.nfev = 0

    def params(self, z) -> ParamSet:
        full = self.template.copy()
        full[self.free_idx] = z
        p = untransform_params(full, self.names)
        return p.with_(**self.fixed) if self.fixed else p

    def __call__(self, z) -> float:
        self.nfev += 1
        if not np.all(np.isfinite(z)):
            return _PENALTY
        try:
            p = self.params(z)
            for w in (p.omega2_rv, p.omega2_mv):
                if w is not None and w > OMEGA2_GUARD:
                    return _PENALTY
            return -log_likelihood(p, self.data)
        except (DomainError, NumericError, OverflowError, FloatingPointError):
            return _PENALTY


def _normalise_fixed(spec: ModelSpec, fixed: dict | None) -> dict:
    fixed = dict(fixed or {})
    names = spec.param_names
    for n in fixed:
        if n not in names:
            raise ConfigError(f"cannot pin {n!r}: not a parameter of drivers={spec.drivers!r}")
        if n in ("alpha", "beta", "gamma"):
            raise ConfigError("alpha, beta and gamma are transformed jointly and cannot be pinned")
    for drv in ("rv", "mv"):
        # With its slope pinned at zero a driver's weight shape is unidentified.
        if fixed.get(f"theta_{drv}") == 0.0 and f"omega2_{drv}" not in fixed:
            fixed[f"omega2_{drv}"] = 1.0
    return {k: float(v) for k, v in fixed.items()}


def starting_params(data: ModelData) -> ParamSet:
    r = data.sample_returns()
    kw = dict(mu=float(r.mean()), alpha=0.05, beta=0.90, gamma=0.02, m=math.log(max(float(r.var()), 1e-300)))
    if data.spec.uses_rv:
        kw.update(theta_rv=0.0, omega2_rv=3.0)
    if data.spec.uses_mv:
        kw.update(theta_mv=0.0, omega2_mv=3.0)
    return ParamSet(**kw)


def _step_sizes(data: ModelData, free) -> np.ndarray:
    r = data.sample_returns()
    steps = []
    for n in free:
        if n == "mu":
            steps.append(0.1 * max(float(r.std()), 1e-8))
        elif n.startswith("theta"):
            x = data.rv if n.endswith("rv") else data.mv
            sd = float(np.nanstd(x)) if x is not None else 0.0
            steps.append(0.5 / sd if sd > 0 else 0.5)
        else:
            steps.append(0.5)
    return np.array(steps)


def _central_gradient(f, z, h=1e-5):
    grad = np.empty_like(z)
    for i in range(z.shape[0]):
        step = h * max(1.0, abs(z[i]))
        e = np.zeros_like(z)
        e[i] = step
        grad[i] = (f(z + e) - f(z - e)) / (2.0 * step)
    return grad


def _run_restart(obj: _Objective, z0, steps, options: OptimOptions):
    f0 = obj(z0)
    simplex = np.vstack([z0] + [z0 + steps[i] * np.eye(len(z0))[i] for i in range(len(z0))])
    res = minimize(
        obj, z0, method="Nelder-Mead",
        options=dict(initial_simplex=simplex, maxiter=options.max_iterations,
                     maxfev=options.max_iterations * (len(z0) + 1),
                     xatol=options.xtol, fatol=options.tolerance * max(1.0, abs(f0)), adaptive=len(z0) > 4),
    )
    return f0, res


def fit(data: ModelData, options: OptimOptions | None = None, fixed: dict | None = None,
        start: ParamSet | None = None, compute_std_errors: bool = True) -> FitResult:
    """Maximise the likelihood with seeded multi-start Nelder-Mead.

    ``fixed`` pins parameters at given values (pinning a slope at zero also
    pins its weight shape). ``start`` replaces the default initial guess of
    restart 0. Raises :class:`ConvergenceError` carrying the best result if
    no restart meets the simplex stopping rule.
    """
    options = options or OptimOptions()
    spec = data.spec
    if data.n_obs < MIN_LIKELIHOOD_DAYS:
        raise LengthError(f"need at least {MIN_LIKELIHOOD_DAYS} likelihood days after burn-in, got {data.n_obs}")
    fixed = _normalise_fixed(spec, fixed)
    names = spec.param_names
    free = [n for n in names if n not in fixed]
    init = (start or starting_params(data)).with_(**fixed)
    init.validate(spec)
    obj = _Objective(data, names, free, fixed)
    full0 = transform_params(init.with_(**{n: 2.0 for n in fixed if n.startswith("omega2")}), names)
    z_init = full0[obj.free_idx]
    steps = _step_sizes(data, free)
    rng = np.random.Generator(np.random.Philox(key=options.seed))
    starts = [z_init] + [z_init + options.jitter * steps / 0.5 * rng.standard_normal(len(free))
                         for _ in range(options.restarts - 1)]

    def run(z0):
        local = _Objective(data, names, free, fixed)
        f0, res = _run_restart(local, z0, steps, options)
        return f0, res, local.nfev

    if options.workers > 1:
        with ThreadPoolExecutor(options.workers) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(z0) for z0 in starts]

    best = min(range(len(runs)), key=lambda i: (runs[i][1].fun, i))
    z_best = np.array(runs[best][1].x, dtype=float)
    f_best = float(runs[best][1].fun)
    nfev = sum(r[2] for r in runs)
    nit = sum(int(r[1].nit) for r in runs)
    converged = any(bool(r[1].success) and r[1].fun < _PENALTY for r in runs)
    polished = False
    if options.polish and f_best < _PENALTY:
        jac = lambda z: _central_gradient(obj, z)  # noqa: E731
        with warnings.catch_warnings():
            # the penalty plateau upsets the line search's step heuristics
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(obj, z_best, method="BFGS", jac=jac, options=dict(gtol=1e-4, maxiter=200))
        if res.fun < f_best:
            z_best, f_best, polished = np.array(res.x), float(res.fun), True
        nit += int(res.nit)
    grad_norm = float(np.linalg.norm(_central_gradient(obj, z_best))) if f_best < _PENALTY else math.inf
    nfev += obj.nfev

    params = obj.params(z_best)
    llf = log_likelihood(params, data)
    k = len(free)
    aic, bic = information_criteria(llf, k, data.n_obs)
    path = variance_path(params, data)
    vr = variance_ratio(path.tau, path.g, spec, path.month_id)
    ses = std_errors(params, data, fixed) if compute_std_errors else {n: None for n in free}
    conv = Convergence(
        iterations=nit, function_evals=nfev, gradient_norm=grad_norm, restarts_used=len(runs),
        converged=converged, best_restart=best, polished=polished,
        restart_llf=tuple(-float(r[1].fun) for r in runs),
        restart_initial_llf=tuple(-float(r[0]) for r in runs),
    )
    result = FitResult(params, ses, llf, aic, bic, vr, path, conv, data.n_obs, k, spec, fixed)
    log.debug("fit %s/%s llf=%.6f grad=%.2e backend=%s", spec.drivers, spec.span, llf, grad_norm, backend())
    if not converged:
        raise ConvergenceError("no restart satisfied the simplex stopping rule", best=result)
    return result


# --------------------------------------------------------------------------
# standard errors
# --------------------------------------------------------------------------

def _hessian(f, x, h):
    p = x.shape[0]
    f0 = f(x)
    H = np.full((p, p), np.nan)
    E = np.diag(h)
    for i in range(p):
        H[i, i] = (f(x + E[i]) - 2.0 * f0 + f(x - E[i])) / (h[i] * h[i])
        for j in range(i):
            v = (f(x + E[i] + E[j]) - f(x + E[i] - E[j]) - f(x - E[i] + E[j]) + f(x - E[i] - E[j]))
            H[i, j] = H[j, i] = v / (4.0 * h[i] * h[j])
    return H


def std_errors(params: ParamSet, data: ModelData, fixed: dict | None = None, rel_step: float = 1e-4) -> dict:
    """Inverse-Hessian standard errors of the free parameters in natural units.

    Parameters whose curvature is missing, non-finite or not positive
    definite are reported as ``None``.
    """
    fixed = _normalise_fixed(data.spec, fixed)
    free = [n for n in data.spec.param_names if n not in fixed]
    x = params.vector(free)
    h = rel_step * np.maximum(np.abs(x), 1.0)

    def negllf(v):
        try:
            return -log_likelihood(params.with_(**dict(zip(free, (float(t) for t in v)))), data)
        except (DomainError, NumericError):
            return math.nan

    H = _hessian(negllf, x, h)
    avail = np.all(np.isfinite(H), axis=1)
    out = {n: None for n in free}
    while avail.any():
        idx = np.flatnonzero(avail)
        w, V = np.linalg.eigh(H[np.ix_(idx, idx)])
        thr = 1e-8 * max(float(np.abs(w).max()), 1e-300)
        weak = w <= thr
        if not weak.any():
            cov = (V / w) @ V.T
            for j, i in enumerate(idx):
                if cov[j, j] > 0.0:
                    out[free[i]] = float(math.sqrt(cov[j, j]))
            break
        load = np.abs(V[:, weak]).max(axis=1)
        drop = load > 1e-3
        if not drop.any():
            drop[int(np.argmax(load))] = True
        avail[idx[drop]] = False
    return out
