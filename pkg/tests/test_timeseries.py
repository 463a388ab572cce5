import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from midasvol.errors import (
    CoverageError,
    DomainError,
    IngestError,
    LengthError,
    WindowError,
)
from midasvol.timeseries import (
    DailySeries,
    MonthlySeries,
    align_monthly,
    descriptive_stats,
    expand_monthly_to_daily,
    log_returns,
    log_transform,
    read_daily_csv,
    read_monthly_csv,
    realized_vol_fixed,
    realized_vol_monthly,
    realized_vol_rolling,
    rolling_macro,
    rolling_macro_series,
    rolling_realized_vol,
    scale_returns,
    write_daily_csv,
    write_monthly_csv,
)


def days(start, n):
    return np.datetime64(start, "D") + np.arange(n)


def daily(values, start="2020-01-01"):
    return DailySeries(days(start, len(values)), values, "x")


def monthly(values, start="2020-01"):
    return MonthlySeries(np.datetime64(start, "M") + np.arange(len(values)), values, "mv")


# ---- containers -----------------------------------------------------------

def test_daily_series_rejects_duplicate_and_unsorted_dates():
    with pytest.raises(IngestError):
        DailySeries(np.array(["2020-01-02", "2020-01-02"], dtype="datetime64[D]"), [1.0, 2.0])
    with pytest.raises(IngestError):
        DailySeries(np.array(["2020-01-03", "2020-01-02"], dtype="datetime64[D]"), [1.0, 2.0])


def test_series_reject_non_finite_values():
    with pytest.raises(IngestError):
        daily([1.0, math.nan])
    with pytest.raises(IngestError):
        monthly([1.0, math.inf])


def test_monthly_series_rejects_gaps():
    with pytest.raises(IngestError, match="gap"):
        MonthlySeries(np.array(["2020-01", "2020-03"], dtype="datetime64[M]"), [1.0, 2.0])


def test_containers_are_immutable():
    s = daily([1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 3.0


# ---- log returns and scaling ---------------------------------------------

def test_two_point_log_return():
    r = log_returns(daily([100.0, 110.0]))
    np.testing.assert_allclose(r.values, [math.log(1.1)], rtol=1e-14)
    assert r.dates[0] == np.datetime64("2020-01-02")


def test_constant_prices_give_zero_returns():
    np.testing.assert_array_equal(log_returns(daily([50.0, 50.0, 50.0])).values, [0.0, 0.0])


def test_observation_count():
    p = daily(np.linspace(100, 120, 6004))
    assert len(log_returns(p)) == 6003


def test_multi_step_returns():
    r = log_returns(daily([1.0, 2.0, 4.0, 8.0]), step=2)
    np.testing.assert_allclose(r.values, [math.log(4)] * 2)


def test_log_returns_errors():
    with pytest.raises(DomainError, match="2020-01-02"):
        log_returns(daily([1.0, 0.0, 2.0]))
    with pytest.raises(LengthError):
        log_returns(daily([1.0]))


def test_scale_returns():
    np.testing.assert_allclose(scale_returns(daily([0.01, -0.02])).values, [1.0, -2.0])
    r = daily([0.0953102])
    assert scale_returns(r, 1.0).values.tolist() == r.values.tolist()
    assert scale_returns(r).label.endswith("x100")
    np.testing.assert_allclose(scale_returns(r).values, [9.53102])
    with pytest.raises(DomainError):
        scale_returns(r, 0.0)


def test_log_transform():
    np.testing.assert_allclose(log_transform(monthly([1.0, math.e, math.e ** 2])).values, [0, 1, 2], atol=1e-15)
    with pytest.raises(DomainError, match="2020-02"):
        log_transform(monthly([1.0, 0.0]))
    assert np.all(np.isfinite(log_transform(monthly([44.3577, 100.0])).values))


# ---- grouping -------------------------------------------------------------

def test_align_monthly_groups_by_calendar_month():
    d = np.array(["2020-01-03", "2020-01-04", "2020-01-05", "2020-02-01", "2020-02-02"], dtype="datetime64[D]")
    p = align_monthly(DailySeries(d, np.arange(5.0)))
    assert p.months.astype(str).tolist() == ["2020-01", "2020-02"]
    assert p.counts.tolist() == [3, 2]
    assert p.starts.tolist() == [0, 3, 5]
    assert p.month_of_day.tolist() == [0, 0, 0, 1, 1]


def test_single_day_panel():
    p = align_monthly(daily([0.5]))
    assert p.n_months == 1 and p.counts.tolist() == [1]


def test_long_sample_month_count():
    dates = np.arange(np.datetime64("2000-01-01"), np.datetime64("2023-11-01"))
    dates = dates[np.is_busday(dates)]
    p = align_monthly(DailySeries(dates, np.zeros(dates.size)))
    assert p.n_months == 286


# ---- realised volatility --------------------------------------------------

def test_realized_vol_fixed_examples(panel_factory):
    d = days("2020-01-01", 3)
    p = align_monthly(DailySeries(d, [0.01, -0.02, 0.03]))
    assert realized_vol_fixed(p, "2020-01") == pytest.approx(0.0014, abs=1e-18)
    p0 = align_monthly(DailySeries(d, [0.0, 0.0, 0.0]))
    assert realized_vol_fixed(p0, "2020-01") == 0.0
    p22 = align_monthly(DailySeries(days("2020-03-01", 22), [0.3] * 22))
    assert realized_vol_fixed(p22, "2020-03") == pytest.approx(22 * 0.09, rel=1e-14)
    with pytest.raises(CoverageError):
        realized_vol_fixed(p, "2021-01")


def test_realized_vol_rolling_examples():
    assert realized_vol_rolling(np.full(30, 0.2), 25, 22) == pytest.approx(22 * 0.04, rel=1e-14)
    r = np.zeros(30)
    r[10] = 0.5
    assert realized_vol_rolling(r, 22, 22) == 0.25
    with pytest.raises(WindowError) as err:
        realized_vol_rolling(r, 21, 22)
    assert err.value.first_valid == 22


def test_rolling_equals_fixed_when_window_is_a_month(panel_factory):
    p = panel_factory([22, 22, 22], seed=3)
    for t in range(1, 3):
        i = int(p.starts[t + 1])
        assert realized_vol_rolling(p.values, i, 22) == pytest.approx(realized_vol_fixed(p, p.months[t]), rel=1e-13)


def test_rolling_series_matches_pointwise(panel_factory):
    p = panel_factory([20, 23, 21], seed=4)
    rv = rolling_realized_vol(p.values, 22)
    assert np.all(np.isnan(rv[:22]))
    for i in range(22, p.n_days):
        assert rv[i] == pytest.approx(realized_vol_rolling(p.values, i, 22), rel=1e-12)


def test_monthly_rv_vector(panel_factory):
    p = panel_factory([5, 7, 6], seed=2)
    np.testing.assert_allclose(realized_vol_monthly(p), [realized_vol_fixed(p, m) for m in p.months], rtol=1e-14)


# ---- macro expansion ------------------------------------------------------

def test_expand_monthly_to_daily():
    jan = days("2020-01-02", 21)
    assert expand_monthly_to_daily(monthly([5.0]), jan).values.tolist() == [5.0] * 21
    cal = np.array(["2020-01-30", "2020-01-31", "2020-02-03", "2020-02-04"], dtype="datetime64[D]")
    assert expand_monthly_to_daily(monthly([5.0, 7.0]), cal).values.tolist() == [5, 5, 7, 7]
    with pytest.raises(CoverageError, match="2020-03"):
        expand_monthly_to_daily(monthly([5.0, 7.0]), np.array(["2020-03-02"], dtype="datetime64[D]"))


def test_rolling_macro_examples():
    assert rolling_macro(np.full(40, 5.0), 30, 22) == 5.0
    x = np.r_[np.full(11, 4.0), np.full(11, 6.0), 1.0]
    assert rolling_macro(x, 22, 22) == 5.0
    with pytest.raises(WindowError):
        rolling_macro(x, 5, 22)


@given(arrays(float, st.integers(25, 80), elements=st.floats(-50, 50)), st.integers(1, 24), st.data())
def test_rolling_macro_matches_direct_mean(x, window, data):
    i = data.draw(st.integers(window, x.shape[0]))
    expected = math.fsum(x[i - j] for j in range(1, window + 1)) / window
    assert rolling_macro(x, i, window) == pytest.approx(expected, rel=1e-12, abs=1e-12)
    if i < x.shape[0]:
        assert rolling_macro_series(x, window)[i] == pytest.approx(expected, rel=1e-9, abs=1e-9)


@given(arrays(float, 6, elements=st.floats(-10, 10)), st.integers(0, 5), st.floats(-10, 10))
def test_expansion_has_no_look_ahead(values, t, bump):
    mv = monthly(values)
    cal = np.concatenate([(np.datetime64("2020-01", "M") + k).astype("datetime64[D]") + np.arange(3) for k in range(6)])
    base = expand_monthly_to_daily(mv, cal).values
    later = values.copy()
    later[t + 1:] += bump
    moved = expand_monthly_to_daily(monthly(later), cal).values
    np.testing.assert_array_equal(base[:3 * (t + 1)], moved[:3 * (t + 1)])


# ---- invariants -----------------------------------------------------------

_nonzero_or_zero = st.one_of(st.just(0.0), st.floats(1e-100, 5.0), st.floats(-5.0, -1e-100))


@given(arrays(float, st.integers(1, 60), elements=_nonzero_or_zero), st.integers(1, 30))
def test_realized_vol_non_negative_and_zero_iff_flat(r, window):
    if r.shape[0] < window:
        return
    v = realized_vol_rolling(r, r.shape[0], window)
    assert v >= 0.0
    assert (v == 0.0) == bool(np.all(r[-window:] == 0.0))


@given(arrays(float, st.integers(2, 200), elements=st.floats(-0.2, 0.2)), st.floats(0.1, 1000))
def test_price_round_trip(r, p0):
    prices = p0 * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    back = log_returns(daily(prices))
    rebuilt = p0 * np.exp(np.concatenate([[0.0], np.cumsum(back.values)]))
    np.testing.assert_allclose(rebuilt, prices, rtol=1e-10)


@given(st.lists(st.integers(0, 400), min_size=1, max_size=120, unique=True))
def test_alignment_preserves_count_and_order(offsets):
    d = np.sort(np.datetime64("2019-12-15") + np.array(offsets))
    s = DailySeries(d, np.arange(d.size, dtype=float))
    p = align_monthly(s)
    assert int(p.counts.sum()) == d.size
    np.testing.assert_array_equal(p.values, s.values)
    assert np.all(np.diff(p.months).astype(int) > 0)


# ---- descriptive statistics -----------------------------------------------

def test_descriptive_stats_small():
    s = descriptive_stats([1.0, 2.0, 3.0])
    assert (s.mean, s.std_dev, s.max, s.min, s.n) == (2.0, 1.0, 3.0, 1.0, 3)
    assert s.skewness == 0.0


def test_symmetric_series_has_zero_skew():
    assert abs(descriptive_stats([-3.0, -1.0, 0.0, 1.0, 3.0]).skewness) < 1e-15


def test_normal_kurtosis_is_about_three():
    x = np.random.default_rng(11).standard_normal(100_000)
    assert abs(descriptive_stats(x).kurtosis - 3.0) < 0.1


def test_constant_series_has_undefined_shape():
    s = descriptive_stats(np.zeros(5))
    assert s.std_dev == 0.0 and math.isnan(s.skewness) and math.isnan(s.kurtosis)
    with pytest.raises(LengthError):
        descriptive_stats([1.0])


# ---- CSV ------------------------------------------------------------------

def test_csv_round_trip(tmp_path):
    s = daily([1.5, 2.25, 1e-17])
    write_daily_csv(tmp_path / "d.csv", s)
    back = read_daily_csv(tmp_path / "d.csv")
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_array_equal(back.dates, s.dates)
    m = monthly([0.1, 0.2])
    write_monthly_csv(tmp_path / "m.csv", m)
    assert read_monthly_csv(tmp_path / "m.csv").values.tolist() == [0.1, 0.2]


@pytest.mark.parametrize("text, match", [
    ("", "empty"),
    ("day,value\n2020-01-01,1\n", "header"),
    ("date,value\n2020-01-02,1\n2020-01-01,2\n", "sorted"),
    ("date,value\n2020-01-01,abc\n", "bad number"),
    ("date,value\n2020-13-01,1\n", "2020-13-01"),
])
def test_daily_csv_errors(tmp_path, text, match):
    f = tmp_path / "bad.csv"
    f.write_text(text)
    with pytest.raises(IngestError, match=match):
        read_daily_csv(f)


def test_monthly_csv_gap_is_an_ingest_error(tmp_path):
    f = tmp_path / "m.csv"
    f.write_text("month,value\n2020-01,1\n2020-03,2\n")
    with pytest.raises(IngestError, match="gap"):
        read_monthly_csv(f)
