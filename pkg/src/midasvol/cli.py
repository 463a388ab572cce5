"""Command-line entry point: ``midasvol <command> [options]``.

Exit statuses: 0 success, 2 bad arguments or configuration, 3 unreadable or
malformed input, 4 numeric failure or non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import DEFAULT_ARCH_LAGS, DEFAULT_LB_LAGS, diagnose_series, format_table, report_json
from .errors import (
    AlignmentError,
    ConfigError,
    ConvergenceError,
    CoverageError,
    DomainError,
    IngestError,
    LengthError,
    MidasVolError,
    WindowError,
)
from .estimate import SCHEMA_VERSION, OptimOptions, fit
from .rmtindex import composite_index, default_groups, load_groups, load_panel_dir
from .simulate import DgpConfig, simulate_panel, write_simulation
from .timeseries import (
    align_monthly,
    log_returns,
    log_transform,
    read_daily_csv,
    read_monthly_csv,
    scale_returns,
    write_columns,
    write_monthly_csv,
)
from .volmodel import ModelSpec, ParamSet, prepare_data

log = logging.getLogger("midasvol")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (UsageError, ConfigError, WindowError, LengthError, DomainError)):
        return EXIT_USAGE
    if isinstance(exc, (OSError, IngestError, CoverageError, AlignmentError)):
        return EXIT_IO
    return EXIT_NUMERIC


def _clean(obj):
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path: Path, doc: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(doc), indent=2) + "\n", encoding="utf-8")


def _load_returns(path, scale: bool):
    r = log_returns(read_daily_csv(path))
    return scale_returns(r, 100.0) if scale else r


# --------------------------------------------------------------------------
# construct-index
# --------------------------------------------------------------------------

def cmd_construct_index(args) -> int:
    panel = load_panel_dir(args.panel)
    groups = load_groups(args.groups) if args.groups else default_groups()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary, status = {}, EXIT_OK
    for group in groups:
        try:
            ep = composite_index(panel, group)
        except MidasVolError as exc:
            print(f"error: group {group.name}: {exc}", file=sys.stderr)
            summary[group.name] = {"error": str(exc)}
            status = status or exit_code_for(exc)
            continue
        write_monthly_csv(out / f"{group.name}.csv", ep.index)
        summary[group.name] = ep.summary()
    write_json(out / "indices.json", {"schema_version": SCHEMA_VERSION, "groups": summary})
    print(f"wrote {sum('error' not in v for v in summary.values())} of {len(groups)} indices to {out}")
    return status


# --------------------------------------------------------------------------
# fit
# --------------------------------------------------------------------------

def _spec_from_args(args, **overrides) -> ModelSpec:
    kw = dict(drivers=args.drivers, span=args.span, K=args.lags, window=args.window,
              lag_spacing=args.lag_spacing, indicator=args.indicator)
    kw.update(overrides)
    return ModelSpec(**kw)


def _common_start(panel, spec: ModelSpec) -> int:
    """Later of the fixed-span and rolling burn-ins, so either span scores the same days."""
    other = ModelSpec(spec.drivers, "rolling" if spec.span == "fixed" else "fixed", spec.K, spec.window,
                      spec.lag_spacing, spec.indicator)
    return max(spec.min_start(panel), other.min_start(panel))


def _fit_name(args) -> str:
    return args.name or f"fit_{args.drivers.replace('+', '_')}_{args.span}"


def cmd_fit(args) -> int:
    if args.drivers in ("mv", "rv+mv") and not args.mv:
        raise UsageError(f"--drivers {args.drivers} needs --mv FILE")
    spec = _spec_from_args(args)
    returns = _load_returns(args.prices, not args.no_scale)
    mv = None
    if args.mv:
        mv = read_monthly_csv(args.mv, "mv")
        mv = mv if args.no_log_mv else log_transform(mv)
    panel = align_monthly(returns)
    if args.sample == "common":
        spec = _spec_from_args(args, likelihood_start=_common_start(panel, spec))
    data = prepare_data(panel, spec, mv)
    options = OptimOptions(restarts=args.restarts, seed=args.seed, workers=args.workers)
    fixed = {}
    if args.pin_theta_zero:
        fixed = {n: 0.0 for n in spec.param_names if n.startswith("theta")}

    status = EXIT_OK
    try:
        result = fit(data, options, fixed=fixed)
    except ConvergenceError as exc:
        if exc.best is None:
            raise
        result, status = exc.best, EXIT_NUMERIC
        print(f"warning: {exc}; writing partial report", file=sys.stderr)

    out = Path(args.out)
    name = _fit_name(args)
    doc = result.to_dict()
    doc["name"] = name
    doc["inputs"] = {"prices": Path(args.prices).name, "mv": Path(args.mv).name if args.mv else None,
                     "scaled": not args.no_scale, "log_mv": bool(args.mv) and not args.no_log_mv}
    doc["optimizer"] = {"restarts": options.restarts, "seed": options.seed}
    write_json(out / f"{name}.json", doc)
    if args.paths:
        p = result.path
        write_columns(out / f"{name}_paths.csv", ("date", "tau", "g", "sigma2"),
                      (p.dates.astype(str), p.tau, p.g, p.sigma2))
    print(f"{name}: llf={result.llf:.4f} aic={result.aic:.4f} bic={result.bic:.4f} "
          f"vr={100 * result.variance_ratio:.2f}% converged={result.convergence.converged}")
    return status


# --------------------------------------------------------------------------
# diagnose
# --------------------------------------------------------------------------

def cmd_diagnose(args) -> int:
    reports = []
    for path in args.prices:
        r = _load_returns(path, not args.no_scale)
        reports.append(diagnose_series(r.values, args.lb_lags, args.arch_lags, Path(path).stem))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "diagnostics.json").write_text(report_json(_clean(reports), SCHEMA_VERSION), encoding="utf-8")
    table = format_table(reports)
    (out / "diagnostics.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate
# --------------------------------------------------------------------------

_PARAM_DEFAULTS = dict(mu=0.0, alpha=0.05, beta=0.90, gamma=0.04, m=0.1,
                       theta_rv=0.002, omega2_rv=4.0, theta_mv=0.3, omega2_mv=5.0)


def _dgp_from_args(args) -> DgpConfig:
    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: {exc}") from None
    spec = ModelSpec(**doc.get("spec", {})) if "spec" in doc else _spec_from_args(args)
    if "params" in doc:
        params = ParamSet(**doc["params"])
    else:
        p = {k: getattr(args, k) for k in ("mu", "alpha", "beta", "gamma", "m")}
        if spec.uses_rv:
            p.update(theta_rv=args.theta_rv, omega2_rv=args.omega2_rv)
        if spec.uses_mv:
            p.update(theta_mv=args.theta_mv, omega2_mv=args.omega2_mv)
        params = ParamSet(**p)
    kw = dict(months=args.months, days_per_month=args.days, mv_phi=args.mv_phi, mv_sd=args.mv_sd, seed=args.seed)
    kw.update({k: v for k, v in doc.items() if k not in ("spec", "params")})
    try:
        return DgpConfig(params=params, spec=spec, **kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def cmd_simulate(args) -> int:
    cfg = _dgp_from_args(args)
    sim = simulate_panel(cfg)
    out = Path(args.out)
    write_simulation(sim, out)
    write_json(out / "dgp.json", {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "spec": cfg.spec.as_dict(),
        "params": cfg.params.as_dict(),
        "months": cfg.months,
        "days_per_month": cfg.days_per_month,
        "mv_phi": cfg.mv_phi,
        "mv_sd": cfg.mv_sd,
        "mv_mean": cfg.mv_mean,
        "presample_months": cfg.presample_months,
        "rng": "Philox4x64-10, key=seed",
    })
    print(f"seed {cfg.seed}: wrote {sim.panel.n_days} days over {sim.panel.n_months} months to {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

def cmd_report(args) -> int:
    fits = []
    for path in args.fits:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}: {exc}") from None
        if "llf" not in doc or "model" not in doc:
            raise IngestError(f"{path}: not a fit report")
        fits.append(doc)
    if not fits:
        raise UsageError("report needs at least one fit JSON")
    best_aic = min(f["aic"] for f in fits if f["aic"] is not None)
    rows = []
    for f in fits:
        m = f["model"]
        rows.append({
            "name": f.get("name"),
            "drivers": m["drivers"],
            "span": m["span"],
            "llf": f["llf"],
            "aic": f["aic"],
            "bic": f["bic"],
            "variance_ratio_pct": f["variance_ratio_pct"],
            "n_obs": f["n_obs"],
            "k": f["k"],
            "converged": f["convergence"]["converged"],
            "delta_aic": None if f["aic"] is None else f["aic"] - best_aic,
        })
    comparisons = []
    for a in rows:
        for b in rows:
            if a["drivers"] == b["drivers"] and a["span"] == "fixed" and b["span"] == "rolling":
                comparisons.append({
                    "drivers": a["drivers"], "fixed": a["name"], "rolling": b["name"],
                    "aic_fixed_minus_rolling": a["aic"] - b["aic"],
                    "same_sample": a["n_obs"] == b["n_obs"],
                })
    doc = {"schema_version": SCHEMA_VERSION, "models": rows, "span_comparisons": comparisons,
           "best_by_aic": min(rows, key=lambda r: r["aic"])["name"]}
    write_json(Path(args.out) / "report.json", doc)
    w = max(len(str(r["name"])) for r in rows)
    print(f"{'model':<{w}}  {'llf':>12}  {'aic':>12}  {'bic':>12}  {'vr%':>7}  {'dAIC':>9}")
    for r in rows:
        print(f"{r['name']:<{w}}  {r['llf']:12.3f}  {r['aic']:12.3f}  {r['bic']:12.3f}  "
              f"{r['variance_ratio_pct']:7.2f}  {r['delta_aic']:9.3f}")
    for c in comparisons:
        print(f"{c['drivers']}: AIC(fixed) - AIC(rolling) = {c['aic_fixed_minus_rolling']:.3f}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a non-negative 64-bit integer")
    return v


def _model_args(p: argparse.ArgumentParser):
    p.add_argument("--drivers", choices=("rv", "mv", "rv+mv"), default="rv")
    p.add_argument("--span", choices=("fixed", "rolling"), default="fixed")
    p.add_argument("--lags", type=_positive, default=36, metavar="K", help="MIDAS lag count (default 36)")
    p.add_argument("--window", type=_positive, default=22, metavar="N",
                   help="rolling window length in days (default 22)")
    p.add_argument("--lag-spacing", choices=("day", "month"), default="day")
    p.add_argument("--indicator", choices=("raw", "demeaned"), default="raw",
                   help="sign used by the asymmetry term (default: raw return)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="midasvol", description="GJR-GARCH-MIDAS volatility toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct-index", help="composite indices from per-economy monthly CSVs")
    p.add_argument("--panel", required=True, help="directory of <label>.csv files (month,value)")
    p.add_argument("--groups", help="JSON group file (default: bundled baskets)")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_construct_index)

    p = sub.add_parser("fit", help="estimate a model on a price series")
    p.add_argument("--prices", required=True, help="daily CSV (date,value)")
    p.add_argument("--mv", help="monthly macro CSV (month,value)")
    _model_args(p)
    p.add_argument("--no-scale", action="store_true", help="do not multiply log returns by 100")
    p.add_argument("--no-log-mv", action="store_true", help="use the macro series without taking logs")
    p.add_argument("--sample", choices=("common", "own"), default="common",
                   help="'common' scores the days both spans can use, 'own' uses this model's own burn-in")
    p.add_argument("--pin-theta-zero", action="store_true", help="fit with every driver slope fixed at 0")
    p.add_argument("--restarts", type=_positive, default=8)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--paths", action="store_true", help="also write date,tau,g,sigma2 CSV")
    p.add_argument("--name", help="output file stem")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("diagnose", help="descriptive statistics and test battery for return series")
    p.add_argument("prices", nargs="+", help="daily price CSVs (date,value)")
    p.add_argument("--no-scale", action="store_true")
    p.add_argument("--lb-lags", type=_positive, default=DEFAULT_LB_LAGS, metavar="m")
    p.add_argument("--arch-lags", type=_positive, default=DEFAULT_ARCH_LAGS, metavar="q")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("simulate", help="draw a synthetic panel from the model")
    p.add_argument("--config", help="JSON DGP config; overrides the flags below")
    _model_args(p)
    p.add_argument("--months", type=_positive, default=480)
    p.add_argument("--days", type=_positive, default=22, help="trading days per month")
    for name, default in _PARAM_DEFAULTS.items():
        p.add_argument(f"--{name.replace('_', '-')}", type=float, default=default)
    p.add_argument("--mv-phi", type=float, default=0.9)
    p.add_argument("--mv-sd", type=float, default=0.4)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="compare fit reports")
    p.add_argument("fits", nargs="+", help="fit JSON files")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MidasVolError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
