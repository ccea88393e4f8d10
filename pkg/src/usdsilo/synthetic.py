"""Synthetic curve worlds for self-tests, examples and golden files.

A world is a set of curves chosen directly (flat continuously compounded
rates plus constant spreads). Market quotes are then generated from it
with the pricing module, which makes every bootstrap a round trip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pricing
from .bootstrap import SiloQuotesLibor, SiloQuotesOis, UsdDomesticCurves
from .termstructure import DiscountCurve, ForwardCurve, ForwardKind, TenorStructure


def flat_curve(rate: float, times) -> DiscountCurve:
    times = np.asarray(times, dtype=float)
    times = times[times > 0]
    return DiscountCurve(tuple(times), tuple(np.exp(-rate * times)))


def simple_forwards(curve: DiscountCurve, tenor: TenorStructure, spread: float = 0.0) -> np.ndarray:
    t = tenor.times
    d = curve.dfs_at(t)
    return (d[:-1] / d[1:] - 1.0) / np.array(tenor.float_accruals) + spread


@dataclass(frozen=True)
class World:
    tenor: TenorStructure
    curves: pricing.CurveSet

    def libor_quotes(self) -> SiloQuotesLibor:
        cs, tenor = self.curves, self.tenor
        m = range(1, tenor.size + 1)
        return SiloQuotesLibor(
            tenor,
            tuple(pricing.irs_par_rate(cs, tenor, k) for k in m),
            tuple(pricing.mtmccs_par_spread(cs, tenor, k) for k in m),
        )

    def ois_quotes(self) -> SiloQuotesOis:
        cs, tenor = self.curves, self.tenor
        m = range(1, tenor.size + 1)
        return SiloQuotesOis(
            tenor,
            tuple(pricing.ois_par_rate(cs, tenor, k) for k in m),
            tuple(pricing.mtmccois_par_spread(cs, tenor, 0, k) for k in m),
        )

    def usd_par_rates(self) -> np.ndarray:
        tenor = self.tenor
        d = self.curves.usd.ois_discount.dfs_at(tenor.pillars)
        annuity = np.cumsum(np.array(tenor.usd_accruals) * d)
        return (1.0 - d) / annuity


def make_world(
    n_periods: int = 40,
    frequency: int = 4,
    dbar_rate: float = 0.05,
    usd_rate: float = 0.03,
    usd_lois: float = 0.002,
    libor_spread: float = 0.001,
    ois_rate: float = 0.045,
    fx_spot_usd_per_j: float = 0.0125,
    k_rate: float | None = 0.02,
    fx_spot_usd_per_k: float = 0.75,
    tenor: TenorStructure | None = None,
) -> World:
    """Default world: Dbar = exp(-5% T), USD OIS flat 3%, USD LIBOR-OIS 20bp."""
    tenor = tenor or TenorStructure.regular(n_periods, frequency)
    times = tenor.times
    dbar = flat_curve(dbar_rate, times)
    usd_curve = flat_curve(usd_rate, times)
    usd = UsdDomesticCurves(usd_curve, ForwardCurve.on_tenor(
        tenor, np.full(tenor.size, usd_lois), ForwardKind.LIBOR_OIS_SPREAD))
    libor = ForwardCurve.on_tenor(tenor, simple_forwards(dbar, tenor, libor_spread), ForwardKind.LIBOR_FORWARD)
    ois = ForwardCurve.on_tenor(tenor, simple_forwards(flat_curve(ois_rate, times), tenor),
                                ForwardKind.COMPOUNDED_OIS_FORWARD)
    dbar_k = flat_curve(k_rate, times) if k_rate is not None else None
    cs = pricing.CurveSet(
        "J", dbar, libor=libor, ois=ois, usd=usd, fx_spot_usd_per_j=fx_spot_usd_per_j,
        currency_k="K" if dbar_k is not None else None, dbar_k=dbar_k,
        fx_spot_usd_per_k=fx_spot_usd_per_k if dbar_k is not None else None,
    )
    return World(tenor, cs)
