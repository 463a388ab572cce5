"""Daily and monthly series, return panels, realised volatility and CSV I/O.

Dates are held as ``datetime64[D]`` arrays and months as ``datetime64[M]``.
All containers are frozen dataclasses over read-only numpy arrays.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CoverageError, IngestError, LengthError, WindowError, DomainError

__all__ = [
    "DailySeries",
    "MonthlySeries",
    "ReturnPanel",
    "Stats",
    "log_returns",
    "scale_returns",
    "log_transform",
    "align_monthly",
    "realized_vol_fixed",
    "realized_vol_monthly",
    "realized_vol_rolling",
    "rolling_realized_vol",
    "expand_monthly_to_daily",
    "rolling_macro",
    "rolling_macro_series",
    "descriptive_stats",
    "read_daily_csv",
    "read_monthly_csv",
    "write_daily_csv",
    "write_monthly_csv",
    "to_month",
]


def _frozen(a, dtype=None) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def to_month(value) -> np.datetime64:
    """Coerce ``'YYYY-MM'``, a date or a datetime64 into ``datetime64[M]``."""
    try:
        return np.datetime64(value, "M")
    except (ValueError, TypeError) as exc:
        raise DomainError(f"not a month identifier: {value!r}") from exc


@dataclass(frozen=True)
class DailySeries:
    dates: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        dates = _frozen(self.dates, "datetime64[D]")
        values = _frozen(self.values, float)
        if dates.shape != values.shape or dates.ndim != 1:
            raise LengthError("dates and values must be 1-d arrays of equal length")
        if dates.size > 1:
            bad = np.flatnonzero(np.diff(dates) <= np.timedelta64(0, "D"))
            if bad.size:
                raise IngestError(f"{self.label or 'series'}: dates not strictly increasing at {dates[bad[0] + 1]}")
        nonfinite = np.flatnonzero(~np.isfinite(values))
        if nonfinite.size:
            raise IngestError(f"{self.label or 'series'}: non-finite value on {dates[nonfinite[0]]}")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MonthlySeries:
    months: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        months = _frozen(self.months, "datetime64[M]")
        values = _frozen(self.values, float)
        if months.shape != values.shape or months.ndim != 1:
            raise LengthError("months and values must be 1-d arrays of equal length")
        if months.size > 1:
            step = np.diff(months).astype(int)
            if np.any(step <= 0):
                i = int(np.flatnonzero(step <= 0)[0]) + 1
                raise IngestError(f"{self.label or 'series'}: months not strictly increasing at {months[i]}")
            if np.any(step != 1):
                i = int(np.flatnonzero(step != 1)[0])
                raise IngestError(f"{self.label or 'series'}: gap after {months[i]}")
        nonfinite = np.flatnonzero(~np.isfinite(values))
        if nonfinite.size:
            raise IngestError(f"{self.label or 'series'}: non-finite value in {months[nonfinite[0]]}")
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def value_at(self, month) -> float:
        i = int((to_month(month) - self.months[0]).astype(int)) if len(self) else -1
        if not 0 <= i < len(self):
            raise CoverageError(f"{self.label or 'series'}: no value for {to_month(month)}")
        return float(self.values[i])


@dataclass(frozen=True)
class ReturnPanel:
    """Daily returns grouped by calendar month.

    ``values``/``dates`` are the flat chronological view; ``months`` and
    ``counts`` (N_t) describe the grouping and ``starts`` the first flat
    index of every month, with a trailing sentinel equal to the day count.
    """

    months: np.ndarray
    counts: np.ndarray
    dates: np.ndarray
    values: np.ndarray
    label: str = ""
    starts: np.ndarray = field(init=False, repr=False)
    month_of_day: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        months = _frozen(self.months, "datetime64[M]")
        counts = _frozen(self.counts, np.int64)
        dates = _frozen(self.dates, "datetime64[D]")
        values = _frozen(self.values, float)
        if np.any(counts < 1):
            raise LengthError("every month needs at least one day")
        if int(counts.sum()) != values.shape[0] or dates.shape != values.shape:
            raise LengthError("month counts do not add up to the flat length")
        if not np.all(np.isfinite(values)):
            raise IngestError("returns must be finite")
        starts = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        starts.setflags(write=False)
        month_of_day = np.repeat(np.arange(months.size), counts)
        month_of_day.setflags(write=False)
        for name, arr in (("months", months), ("counts", counts), ("dates", dates), ("values", values),
                          ("starts", starts), ("month_of_day", month_of_day)):
            object.__setattr__(self, name, arr)

    @property
    def n_months(self) -> int:
        return self.months.shape[0]

    @property
    def n_days(self) -> int:
        return self.values.shape[0]

    def month_position(self, month) -> int:
        m = to_month(month)
        pos = np.searchsorted(self.months, m)
        if pos >= self.n_months or self.months[pos] != m:
            raise CoverageError(f"month {m} not in panel")
        return int(pos)

    def month_returns(self, month) -> np.ndarray:
        t = self.month_position(month)
        return self.values[self.starts[t]:self.starts[t + 1]]

    def flat(self) -> DailySeries:
        return DailySeries(self.dates, self.values, self.label)


@dataclass(frozen=True)
class Stats:
    n: int
    max: float
    min: float
    mean: float
    std_dev: float
    skewness: float
    kurtosis: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "max", "min", "mean", "std_dev", "skewness", "kurtosis")}


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------

def log_returns(prices: DailySeries, step: int = 1) -> DailySeries:
    """Log price differences over ``step`` observations, dated at the later day."""
    if step < 1:
        raise DomainError("step must be a positive integer")
    if len(prices) < step + 1:
        raise LengthError(f"need at least {step + 1} prices, got {len(prices)}")
    p = prices.values
    bad = np.flatnonzero(p <= 0.0)
    if bad.size:
        raise DomainError(f"non-positive price {p[bad[0]]} on {prices.dates[bad[0]]}")
    lp = np.log(p)
    return DailySeries(prices.dates[step:], lp[step:] - lp[:-step], prices.label)


def scale_returns(r: DailySeries, factor: float = 100.0) -> DailySeries:
    if not factor > 0:
        raise DomainError("scale factor must be positive")
    label = f"{r.label} x{factor:g}" if factor != 1 else r.label
    return DailySeries(r.dates, r.values * factor, label)


def log_transform(mv: MonthlySeries) -> MonthlySeries:
    # Zero readings are rejected rather than shifted; the caller picks the offset.
    bad = np.flatnonzero(mv.values <= 0.0)
    if bad.size:
        raise DomainError(f"{mv.label or 'series'}: cannot take log of {mv.values[bad[0]]} in {mv.months[bad[0]]}")
    return MonthlySeries(mv.months, np.log(mv.values), mv.label)


def align_monthly(returns: DailySeries) -> ReturnPanel:
    if len(returns) == 0:
        raise LengthError("cannot build a panel from an empty series")
    month_of = returns.dates.astype("datetime64[M]")
    months, counts = np.unique(month_of, return_counts=True)
    return ReturnPanel(months, counts, returns.dates, returns.values, returns.label)


# --------------------------------------------------------------------------
# realised volatility and macro windows
# --------------------------------------------------------------------------

def realized_vol_fixed(panel: ReturnPanel, month) -> float:
    r = panel.month_returns(month)
    return float(np.dot(r, r))


def realized_vol_monthly(panel: ReturnPanel) -> np.ndarray:
    """Sum of squared daily returns for every month of the panel."""
    return np.add.reduceat(panel.values ** 2, panel.starts[:-1])


def realized_vol_rolling(returns, i: int, window: int = 22) -> float:
    """Sum of the ``window`` squared returns strictly before flat index ``i``."""
    r = np.asarray(getattr(returns, "values", returns), dtype=float)
    if window < 1:
        raise DomainError("window must be positive")
    if i < window or i > r.shape[0]:
        raise WindowError(f"day {i} lacks a full {window}-day window", first_valid=window)
    w = r[i - window:i]
    return float(np.dot(w, w))


def rolling_realized_vol(returns, window: int = 22) -> np.ndarray:
    """Trailing-window RV for every flat index; NaN where the window is incomplete."""
    r = np.ascontiguousarray(getattr(returns, "values", returns), dtype=float)
    return kernels.trailing_sum(r * r, window)


def expand_monthly_to_daily(mv: MonthlySeries, calendar) -> DailySeries:
    """Give every trading day the value of its own calendar month."""
    days = np.asarray(getattr(calendar, "dates", calendar), dtype="datetime64[D]")
    if len(mv) == 0:
        raise CoverageError("macro series is empty")
    pos = (days.astype("datetime64[M]") - mv.months[0]).astype(np.int64)
    missing = np.flatnonzero((pos < 0) | (pos >= len(mv)))
    if missing.size:
        raise CoverageError(f"{mv.label or 'macro series'}: no value for {days[missing[0]].astype('datetime64[M]')}")
    return DailySeries(days, mv.values[pos], mv.label)


def rolling_macro(mv_daily, i: int, window: int = 22) -> float:
    x = np.asarray(getattr(mv_daily, "values", mv_daily), dtype=float)
    if i < window or i > x.shape[0]:
        raise WindowError(f"day {i} lacks a full {window}-day window", first_valid=window)
    return float(x[i - window:i].mean())


def rolling_macro_series(mv_daily, window: int = 22) -> np.ndarray:
    x = np.ascontiguousarray(getattr(mv_daily, "values", mv_daily), dtype=float)
    return kernels.trailing_sum(x, window) / window


# --------------------------------------------------------------------------
# descriptive statistics
# --------------------------------------------------------------------------

def descriptive_stats(series) -> Stats:
    """Max/min/mean, sample std (n-1), moment skewness and non-excess kurtosis.

    Skewness and kurtosis are NaN for a constant series.
    """
    x = np.asarray(getattr(series, "values", series), dtype=float)
    n = x.shape[0]
    if n < 2:
        raise LengthError(f"need at least 2 observations, got {n}")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev ** 2))
    if m2 > 0.0:
        skew = float(np.mean(dev ** 3)) / m2 ** 1.5
        kurt = float(np.mean(dev ** 4)) / m2 ** 2
    else:
        skew = kurt = math.nan
    return Stats(n, float(x.max()), float(x.min()), mean, math.sqrt(m2 * n / (n - 1)), skew, kurt)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _read_rows(path, key: str) -> list[tuple[str, str]]:
    path = Path(path)
    try:
        return _read_rows_checked(path, key)
    except UnicodeDecodeError as exc:
        raise IngestError(f"{path}: not UTF-8 text ({exc.reason} at byte {exc.start})") from None


def _read_rows_checked(path: Path, key: str) -> list[tuple[str, str]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if header[:2] != [key, "value"]:
            raise IngestError(f"{path}: expected header '{key},value', got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise IngestError(f"{path}:{lineno}: expected two columns")
            rows.append((row[0].strip(), row[1].strip()))
    return rows


def _parse_values(path, rows) -> np.ndarray:
    out = np.empty(len(rows))
    for j, (_, v) in enumerate(rows):
        try:
            out[j] = float(v)
        except ValueError:
            raise IngestError(f"{path}: bad number {v!r} on row {j + 2}") from None
    return out


def _check_sorted(path, stamps: np.ndarray):
    if stamps.size > 1:
        bad = np.flatnonzero(np.diff(stamps).astype(np.int64) <= 0)
        if bad.size:
            raise IngestError(f"{path}: rows not sorted/unique at {stamps[bad[0] + 1]}")


def read_daily_csv(path, label: str | None = None) -> DailySeries:
    """Read a ``date,value`` file with ISO-8601 dates, pre-sorted."""
    rows = _read_rows(path, "date")
    try:
        dates = np.array([d for d, _ in rows], dtype="datetime64[D]")
    except ValueError as exc:
        raise IngestError(f"{path}: {exc}") from None
    _check_sorted(path, dates)
    return DailySeries(dates, _parse_values(path, rows), label or Path(path).stem)


def read_monthly_csv(path, label: str | None = None) -> MonthlySeries:
    """Read a ``month,value`` file with ``YYYY-MM`` months, pre-sorted and gap-free."""
    rows = _read_rows(path, "month")
    try:
        months = np.array([m for m, _ in rows], dtype="datetime64[M]")
    except ValueError as exc:
        raise IngestError(f"{path}: {exc}") from None
    _check_sorted(path, months)
    return MonthlySeries(months, _parse_values(path, rows), label or Path(path).stem)


def write_columns(path, header: Sequence[str], columns: Sequence[Sequence]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([c if isinstance(c, str) else repr(float(c)) for c in row])


def write_daily_csv(path, series: DailySeries):
    write_columns(path, ("date", "value"), (series.dates.astype(str), series.values))


def write_monthly_csv(path, series: MonthlySeries):
    write_columns(path, ("month", "value"), (series.months.astype(str), series.values))
