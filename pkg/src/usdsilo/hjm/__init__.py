"""Multi-factor HJM Monte Carlo for the USD silo."""

from .diagnostics import DiagnosticsReport, diagnose, martingale_diagnostics
from .engine import HjmEngine, PathEnsemble, PathState, evolve_step, mean_stderr, simulate
from .model import Factor, HjmModelSpec, SimGrid, hjm_drift
from .swaption import (
    SwaptionKind,
    SwaptionSpec,
    intrinsic_value,
    parity_check,
    price_basis_swaption,
    price_ois_swaption,
    price_swaption,
    swap_rate_volatilities,
)

__all__ = [
    "DiagnosticsReport", "Factor", "HjmEngine", "HjmModelSpec", "PathEnsemble", "PathState",
    "SimGrid", "SwaptionKind", "SwaptionSpec", "diagnose", "evolve_step", "hjm_drift",
    "intrinsic_value", "martingale_diagnostics", "mean_stderr", "parity_check",
    "price_basis_swaption", "price_ois_swaption", "price_swaption", "simulate",
    "swap_rate_volatilities",
]
