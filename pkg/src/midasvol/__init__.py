"""GJR-GARCH-MIDAS volatility models, eigenportfolio indices and diagnostics."""

__version__ = "0.1.0"

from ._accel import backend
from .estimate import FitResult, OptimOptions, fit, log_likelihood, std_errors, variance_ratio
from .midas import beta_weights, beta_weights_restricted
from .simulate import DgpConfig, simulate_panel
from .timeseries import DailySeries, MonthlySeries, ReturnPanel
from .volmodel import ModelSpec, ParamSet, prepare_data, variance_path

__all__ = [
    "__version__",
    "backend",
    "FitResult",
    "OptimOptions",
    "fit",
    "log_likelihood",
    "std_errors",
    "variance_ratio",
    "beta_weights",
    "beta_weights_restricted",
    "DgpConfig",
    "simulate_panel",
    "DailySeries",
    "MonthlySeries",
    "ReturnPanel",
    "ModelSpec",
    "ParamSet",
    "prepare_data",
    "variance_path",
]
