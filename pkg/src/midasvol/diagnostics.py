"""Normality, autocorrelation and ARCH-effect tests with chi-square p-values."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gammaincc

from .errors import DomainError, LengthError, ZeroVarianceError
from .timeseries import descriptive_stats

__all__ = [
    "TestResult",
    "chi_square_sf",
    "jarque_bera",
    "autocorrelations",
    "ljung_box",
    "arch_lm",
    "diagnose_series",
    "format_table",
    "DEFAULT_LB_LAGS",
    "DEFAULT_ARCH_LAGS",
]

DEFAULT_LB_LAGS = 20
DEFAULT_ARCH_LAGS = 12


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this

    statistic: float
    df: int
    p_value: float
    lags: int | None = None
    degenerate: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def chi_square_sf(x: float, df: int) -> float:
    """P(X > x) for X ~ chi-square(df), via the regularised upper incomplete gamma."""
    if df < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df}")
    if x <= 0.0:
        return 1.0
    return float(gammaincc(0.5 * df, 0.5 * x))


def _values(series) -> np.ndarray:
    x = np.asarray(getattr(series, "values", series), dtype=float)
    if x.ndim != 1:
        raise LengthError("expected a one-dimensional series")
    return x


def jarque_bera(series) -> TestResult:
    x = _values(series)
    if x.shape[0] < 4:
        raise LengthError(f"Jarque-Bera needs at least 4 observations, got {x.shape[0]}")
    st = descriptive_stats(x)
    if math.isnan(st.skewness):
        raise ZeroVarianceError("Jarque-Bera is undefined for a constant series")
    jb = st.n * (st.skewness ** 2 / 6.0 + (st.kurtosis - 3.0) ** 2 / 24.0)
    return TestResult(jb, 2, chi_square_sf(jb, 2))


def autocorrelations(series, lags: int) -> np.ndarray:
    """Biased sample autocorrelations at lags 1..lags (denominator n)."""
    x = _values(series)
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0 or np.ptp(x) == 0.0:
        raise ZeroVarianceError("autocorrelations are undefined for a constant series")
    return np.array([float(d[k:] @ d[:-k]) / denom for k in range(1, lags + 1)])


def ljung_box(series, lags: int = DEFAULT_LB_LAGS) -> TestResult:
    x = _values(series)
    n = x.shape[0]
    if not 1 <= lags < n:
        raise LengthError(f"Ljung-Box needs 1 <= lags < n, got lags={lags}, n={n}")
    rho = autocorrelations(x, lags)
    k = np.arange(1, lags + 1)
    q = float(n * (n + 2) * np.sum(rho ** 2 / (n - k)))
    return TestResult(q, lags, chi_square_sf(q, lags), lags)


def arch_lm(series, lags: int = DEFAULT_ARCH_LAGS) -> TestResult:
    """Engle's LM test: (n - q) * R^2 from regressing e_t^2 on q of its own lags.

    The input is demeaned first. Constant squares leave nothing to explain and
    return a zero statistic flagged as degenerate.
    """
    x = _values(series)
    n = x.shape[0]
    if lags < 1 or n <= 2 * lags + 1:
        raise LengthError(f"ARCH-LM needs n > 2q + 1, got n={n}, q={lags}")
    e2 = (x - x.mean()) ** 2
    y = e2[lags:]
    yc = y - y.mean()
    tss = float(yc @ yc)
    if tss == 0.0 or np.ptp(y) == 0.0:
        return TestResult(0.0, lags, 1.0, lags, degenerate=True)
    X = np.column_stack([np.ones(n - lags)] + [e2[lags - j:n - j] for j in range(1, lags + 1)])
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    r2 = max(0.0, 1.0 - float(resid @ resid) / tss)
    stat = (n - lags) * r2
    return TestResult(stat, lags, chi_square_sf(stat, lags), lags, degenerate=bool(rank < X.shape[1]))


def _safe(fn, *args):
    try:
        return fn(*args)
    except ZeroVarianceError:
        return None


def diagnose_series(series, lb_lags: int = DEFAULT_LB_LAGS, arch_lags: int = DEFAULT_ARCH_LAGS,
                    label: str | None = None) -> dict:
    """Descriptive statistics plus the full test battery.

    Tests that are undefined on the input (constant series) come back as
    ``None`` with ``degenerate`` set rather than raising.
    """
    x = _values(series)
    stats = descriptive_stats(x)
    jb = _safe(jarque_bera, x)
    lb = _safe(ljung_box, x, lb_lags)
    lb2 = _safe(ljung_box, x * x, lb_lags)
    arch = arch_lm(x, arch_lags)
    tests = {"jarque_bera": jb, "ljung_box": lb, "ljung_box_sq": lb2, "arch_lm": arch}
    return {
        "label": label or getattr(series, "label", "") or "series",
        "stats": {k: (None if isinstance(v, float) and math.isnan(v) else v)
                  for k, v in stats.as_dict().items()},
        "tests": {k: (None if v is None else v.as_dict()) for k, v in tests.items()},
        "degenerate": any(v is None or v.degenerate for v in tests.values()),
        "lb_lags": lb_lags,
        "arch_lags": arch_lags,
        "adf": "not computed",
        "pp": "not computed",
    }


def _cell(test: dict | None) -> str:
    if test is None:
        return "degenerate"
    flag = "*" if test["degenerate"] else ""
    return f"{test['statistic']:.4f}{flag} ({test['p_value']:.4f})"


def _num(v) -> str:
    return "nan" if v is None else f"{v:.4f}"


def format_table(reports: list[dict]) -> str:
    """Aligned text table, one row per series; p-values in parentheses."""
    header = ["Series", "Obs", "Max", "Min", "Mean", "Std.Dev", "Skewness", "Kurtosis",
              "J-B", "L-B", "L-B2", "ARCH-LM", "ADF", "PP"]
    rows = [header]
    for rep in reports:
        s, t = rep["stats"], rep["tests"]
        rows.append([
            rep["label"], str(s["n"]), _num(s["max"]), _num(s["min"]), _num(s["mean"]),
            _num(s["std_dev"]), _num(s["skewness"]), _num(s["kurtosis"]),
            _cell(t["jarque_bera"]), _cell(t["ljung_box"]), _cell(t["ljung_box_sq"]), _cell(t["arch_lm"]),
            rep["adf"], rep["pp"],
        ])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
             for r in rows]
    lines.insert(1, "-" * len(lines[0]))
    lines.append(f"L-B lags = {reports[0]['lb_lags'] if reports else DEFAULT_LB_LAGS}, "
                 f"ARCH-LM lags = {reports[0]['arch_lags'] if reports else DEFAULT_ARCH_LAGS}; "
                 "p-values in parentheses; ADF/PP not computed")
    return "\n".join(lines) + "\n"


def report_json(reports: list[dict], schema_version: int = 1) -> str:
    return json.dumps({"schema_version": schema_version, "series": reports}, indent=2, sort_keys=True) + "\n"
