import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import chi2_sf
from midasvol.diagnostics import (
    arch_lm,
    autocorrelations,
    chi_square_sf,
    diagnose_series,
    format_table,
    jarque_bera,
    ljung_box,
    report_json,
)
from midasvol.errors import DomainError, LengthError, ZeroVarianceError
from scipy.stats import chi2

ALT = np.array([1.0, -1.0] * 300)
series = st.lists(st.floats(-1e3, 1e3), min_size=30, max_size=120).filter(lambda v: np.ptp(v) > 1e-3)


# ---- chi-square tail ------------------------------------------------------

# reference tails from the mpmath power-series oracle, frozen
FROZEN_SF = [
    (31.410, 20, 0.050005239202315165),
    (3.841458820694124, 1, 0.05000000000000006),
    (11.0705, 5, 0.049999955428043655),
    (26.217, 12, 0.0099998930745827),
    (9.21, 2, 0.010001702004705479),
    (79.08, 60, 0.050015248938405345),
]


@pytest.mark.parametrize("x, df, ref", FROZEN_SF)
def test_chi_square_sf_against_series_oracle(x, df, ref):
    assert chi_square_sf(x, df) == pytest.approx(ref, abs=1e-10)
    assert chi2_sf(x, df) == pytest.approx(ref, abs=1e-15)


def test_chi_square_sf_examples():
    assert chi_square_sf(0.0, 7) == 1.0
    assert chi_square_sf(2 * math.log(2), 2) == pytest.approx(0.5, abs=1e-15)
    assert chi_square_sf(31.410, 20) == pytest.approx(0.0500, abs=1e-4)
    with pytest.raises(DomainError):
        chi_square_sf(1.0, 0)


@given(st.floats(0, 200), st.floats(0, 200), st.integers(1, 60))
def test_chi_square_sf_monotone(a, b, df):
    lo, hi = sorted((a, b))
    assert 0.0 <= chi_square_sf(hi, df) <= chi_square_sf(lo, df) <= 1.0


# ---- Jarque-Bera ----------------------------------------------------------

def test_jarque_bera_alternating():
    res = jarque_bera(ALT)
    assert res.statistic == pytest.approx(100.0, abs=1e-10) and res.df == 2


def test_jarque_bera_zero_for_matching_moments():
    # symmetric three-point law with kurtosis exactly 3: P(0) = 2/3, P(+-sqrt3) = 1/6
    x = np.array([0.0] * 4 + [math.sqrt(3), -math.sqrt(3)])
    res = jarque_bera(np.tile(x, 50))
    assert res.statistic == pytest.approx(0.0, abs=1e-10)
    assert res.p_value == pytest.approx(1.0, abs=1e-10)


def test_jarque_bera_errors():
    with pytest.raises(LengthError):
        jarque_bera([1.0, 2.0, 3.0])
    with pytest.raises(ZeroVarianceError):
        jarque_bera([2.0] * 10)


def test_jarque_bera_size_on_normal_draws():
    rejections = sum(jarque_bera(np.random.default_rng(s).standard_normal(100_000)).p_value < 0.01
                     for s in range(100))
    assert rejections <= 3


# ---- Ljung-Box ------------------------------------------------------------

def test_ljung_box_alternating():
    n = 100
    x = ALT[:n]
    assert autocorrelations(x, 1)[0] == pytest.approx(-(n - 1) / n, abs=1e-15)
    res = ljung_box(x, 1)
    assert res.statistic == pytest.approx(n * (n + 2) * ((n - 1) / n) ** 2 / (n - 1), abs=1e-10)
    assert res.statistic == pytest.approx(101.0, abs=0.05)


def test_squared_series_check_is_composition():
    x = np.random.default_rng(0).standard_normal(500)
    rep = diagnose_series(x, 10, 5)
    assert rep["tests"]["ljung_box_sq"] == ljung_box(x * x, 10).as_dict()


def test_ljung_box_errors():
    with pytest.raises(LengthError):
        ljung_box([1.0, 2.0, 3.0], 3)
    with pytest.raises(ZeroVarianceError):
        ljung_box([1.0] * 30, 5)


def _central_band_hits(stat_fn, df, seeds=100):
    lo, hi = chi2.ppf([0.005, 0.995], df)
    return sum(lo <= stat_fn(np.random.default_rng(s).standard_normal(10_000)) <= hi for s in range(seeds))


def test_ljung_box_size():
    assert _central_band_hits(lambda x: ljung_box(x, 20).statistic, 20) >= 95


def test_arch_lm_size():
    assert _central_band_hits(lambda x: arch_lm(x, 12).statistic, 12) >= 95


# ---- ARCH-LM --------------------------------------------------------------

def _arch1(seed, n=5000, omega=1.0, a=0.5):
    z = np.random.default_rng(seed).standard_normal(n + 100)
    e = np.empty_like(z)
    prev = 0.0
    for i, zi in enumerate(z):
        prev = math.sqrt(omega + a * prev * prev) * zi
        e[i] = prev
    return e[100:]


def test_arch_lm_power():
    assert sum(arch_lm(_arch1(s), 12).p_value < 0.01 for s in range(100)) >= 99


def test_arch_lm_constant_squares_is_degenerate():
    res = arch_lm(np.tile([1.0, -1.0], 100), 12)
    assert res.degenerate and res.statistic == 0.0 and res.p_value == 1.0


def test_arch_lm_needs_enough_data():
    with pytest.raises(LengthError):
        arch_lm(np.arange(25.0), 12)


# ---- invariants -----------------------------------------------------------

@given(series)
def test_statistics_and_p_values_in_range(xs):
    for res in (jarque_bera(xs), ljung_box(xs, 5), arch_lm(xs, 3)):
        assert res.statistic >= 0.0 and 0.0 <= res.p_value <= 1.0


@given(series, st.floats(0.01, 100), st.floats(-100, 100), st.booleans())
def test_affine_invariance(xs, a, b, flip):
    x = np.array(xs)
    y = (-a if flip else a) * x + b
    assert ljung_box(y, 5).statistic == pytest.approx(ljung_box(x, 5).statistic, rel=1e-6, abs=1e-8)
    if not flip:
        assert jarque_bera(y).statistic == pytest.approx(jarque_bera(x).statistic, rel=1e-6, abs=1e-8)


# ---- report ---------------------------------------------------------------

def test_report_and_table():
    rng = np.random.default_rng(9)
    reports = [diagnose_series(rng.standard_normal(300), label="noise"),
               diagnose_series(np.zeros(300), label="flat")]
    assert reports[0]["degenerate"] is False and reports[0]["adf"] == "not computed"
    flat = reports[1]
    assert flat["degenerate"] and flat["tests"]["jarque_bera"] is None and flat["tests"]["arch_lm"]["degenerate"]
    doc = json.loads(report_json(reports))
    assert doc["schema_version"] == 1 and len(doc["series"]) == 2
    table = format_table(reports)
    assert "noise" in table and "degenerate" in table and "not computed" in table
    lines = table.splitlines()
    assert len({len(l) for l in lines[:4]}) == 1
