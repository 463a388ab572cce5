"""Regenerate the data files shipped under ``src/midasvol/data``.

Run from the repository root: ``python scripts/make_bundled_data.py``.
Everything is seeded, so re-running reproduces the files byte for byte.
"""

from __future__ import annotations

import json
import math
import shutil
from pathlib import Path

import numpy as np

from midasvol.cli import main as cli_main
from midasvol.simulate import DgpConfig, simulate_panel, write_simulation
from midasvol.timeseries import MonthlySeries, write_monthly_csv
from midasvol.volmodel import ModelSpec, ParamSet

DATA = Path(__file__).resolve().parents[1] / "src" / "midasvol" / "data"

# label, mean, std of the monthly economy-level risk readings the synthetic
# panel is calibrated to
ECONOMIES = [
    ("GPR_ARG", 0.0276, 0.0277), ("GPR_AUS", 0.1055, 0.0742), ("GPR_BEL", 0.1605, 0.1455),
    ("GPR_BRA", 0.0536, 0.0377), ("GPR_CAN", 0.2229, 0.173), ("GPR_CHE", 0.0602, 0.059),
    ("GPR_CHL", 0.0164, 0.0224), ("GPR_CHN", 0.5561, 0.3133), ("GPR_COL", 0.0394, 0.0379),
    ("GPR_DEU", 0.4258, 0.3177), ("GPR_DNK", 0.0354, 0.0291), ("GPR_EGY", 0.1845, 0.1589),
    ("GPR_ESP", 0.1068, 0.1113), ("GPR_FIN", 0.0371, 0.0652), ("GPR_FRA", 0.5438, 0.3393),
    ("GPR_GBR", 1.1202, 0.6996), ("GPR_HKG", 0.0609, 0.0729), ("GPR_HUN", 0.0318, 0.0553),
    ("GPR_IDN", 0.0527, 0.0541), ("GPR_IND", 0.2211, 0.1319), ("GPR_ISR", 0.4006, 0.3523),
    ("GPR_ITA", 0.145, 0.0975), ("GPR_JPN", 0.241, 0.1678), ("GPR_KOR", 0.3129, 0.248),
    ("GPR_MEX", 0.0983, 0.0624), ("GPR_MYS", 0.0403, 0.066), ("GPR_NLD", 0.0837, 0.0588),
    ("GPR_NOR", 0.0533, 0.0478), ("GPR_PER", 0.0197, 0.0208), ("GPR_PHL", 0.0456, 0.043),
    ("GPR_POL", 0.0953, 0.1797), ("GPR_PRT", 0.0224, 0.0229), ("GPR_RUS", 0.8516, 0.8321),
    ("GPR_SAU", 0.2297, 0.1798), ("GPR_SWE", 0.0558, 0.059), ("GPR_THA", 0.0398, 0.0316),
    ("GPR_TUN", 0.0328, 0.0575), ("GPR_TUR", 0.2559, 0.1857), ("GPR_TWN", 0.0729, 0.0931),
    ("GPR_UKR", 0.3443, 0.8885), ("GPR_USA", 2.4264, 1.3621), ("GPR_VEN", 0.0551, 0.0615),
    ("GPR_VNM", 0.0294, 0.0239), ("GPR_ZAF", 0.0547, 0.0327),
]

GROUPS = {
    "GPR_NA": "CAN MEX USA",
    "GPR_SA": "ARG BRA CHL COL PER VEN",
    "GPR_ENE": "DNK FIN HUN NOR POL RUS SWE UKR GBR",
    "GPR_ESW": "BEL FRA DEU ITA NLD PRT ESP CHE",
    "GPR_MEA": "EGY ISR SAU ZAF TUN TUR",
    "GPR_AO": "AUS CHN HKG JPN KOR PHL TWN IDN IND MYS THA VNM",
    "GPR_wh_prod": "CHN IND RUS USA FRA CAN DEU AUS UKR TUR",
    "GPR_wh_imp": "USA CHN BRA ARG MEX IND UKR IDN FRA ZAF",
    "GPR_wh_exp": "USA BRA ARG CHN IND CAN UKR RUS IDN ITA",
    "GPR_mz_prod": "CHN IND IDN VNM THA PHL BRA JPN USA KOR",
    "GPR_mz_imp": "EGY ITA IDN BRA JPN ESP NLD CHN KOR MEX",
    "GPR_mz_exp": "JPN MEX KOR CHN EGY ESP TWN VNM NLD COL",
    "GPR_sb_prod": "CHN NLD MEX JPN DEU ESP TWN THA IDN EGY",
    "GPR_sb_imp": "MEX VEN TUR BRA ITA COL PRT SAU ESP FRA",
    "GPR_sb_exp": "USA CAN RUS FRA AUS UKR ARG DEU HUN GBR",
    "GPR_rc_prod": "USA ARG BRA UKR FRA CHN HUN IND RUS ZAF",
    "GPR_rc_imp": "BRA USA ARG CAN NLD UKR RUS CHN BEL IND",
    "GPR_rc_exp": "USA BRA IND ARG RUS FRA ESP CHN ITA AUS",
}

PANEL_MONTHS = 286
PANEL_START = "2000-01"
PANEL_SEED = 20231031


def write_groups():
    doc = {"groups": [{"name": k, "members": ["GPR_" + m for m in v.split()]} for k, v in GROUPS.items()]}
    (DATA / "groups_default.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_panel():
    """One common AR(1) factor plus idiosyncratic noise, mapped through a lognormal."""
    out = DATA / "gpre_synthetic"
    shutil.rmtree(out, ignore_errors=True)
    out.mkdir(parents=True)
    rng = np.random.Generator(np.random.Philox(key=PANEL_SEED))
    f = np.empty(PANEL_MONTHS)
    f[0] = rng.standard_normal()
    for t in range(1, PANEL_MONTHS):
        f[t] = 0.8 * f[t - 1] + math.sqrt(1 - 0.64) * rng.standard_normal()
    months = np.datetime64(PANEL_START, "M") + np.arange(PANEL_MONTHS)
    loadings = rng.uniform(0.4, 0.9, len(ECONOMIES))
    for (label, mean, sd), lam in zip(ECONOMIES, loadings):
        z = lam * f + math.sqrt(1 - lam * lam) * rng.standard_normal(PANEL_MONTHS)
        b = math.sqrt(math.log1p((sd / mean) ** 2))
        x = np.exp(math.log(mean) - 0.5 * b * b + b * z)
        write_monthly_csv(out / f"{label}.csv", MonthlySeries(months, np.round(x, 6), label))


def write_reference():
    """Two-driver rolling-span draw plus a golden single-driver rolling fit."""
    ref = DATA / "reference"
    shutil.rmtree(ref, ignore_errors=True)
    spec = ModelSpec(drivers="rv+mv", span="rolling", K=36, window=22)
    params = ParamSet(mu=0.02, alpha=0.06, beta=0.90, gamma=0.04, m=0.0,
                      theta_rv=0.005, omega2_rv=4.0, theta_mv=0.3, omega2_mv=5.0)
    sim = simulate_panel(DgpConfig(params, spec, months=240, days_per_month=22, seed=7))
    write_simulation(sim, ref)
    (ref / "truth.csv").unlink()
    code = cli_main(["fit", "--prices", str(ref / "prices.csv"), "--drivers", "rv", "--span", "rolling",
                     "--lags", "36", "--window", "22", "--seed", "0", "--name", "golden_fit_rv_rolling",
                     "--out", str(ref)])
    if code != 0:
        raise SystemExit(f"golden fit failed with status {code}")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    write_groups()
    write_panel()
    write_reference()
