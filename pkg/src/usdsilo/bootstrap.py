"""Bootstrapping of USD-collateralized curves for a non-G5 currency j.

Two routes are provided:

- LIBOR route: IRS par rates S_M and MtM cross-currency basis spreads B_M,
  together with the USD OIS discount curve and USD LIBOR-OIS forward spreads,
  fix the effective discount factors Dbar(0, T_M) one pillar at a time. The
  currency-j LIBOR forwards then follow from the IRS quotes.
- OIS route: OIS par rates plus MtMCCOIS spreads. The USD leg is worth zero,
  so the recursion needs no USD input at all.

All recursions are forward-only: pillar M uses nothing beyond pillar M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonPositiveDiscount, QuoteGap
from .termstructure import (
    DiscountCurve,
    ForwardCurve,
    ForwardKind,
    TenorStructure,
    forward_df,
)


@dataclass(frozen=True)
class UsdDomesticCurves:
    ois_discount: DiscountCurve
    libor_ois_spreads: ForwardCurve

    def __post_init__(self) -> None:
        if self.libor_ois_spreads.kind is not ForwardKind.LIBOR_OIS_SPREAD:
            raise ValueError("USD spreads must be a LiborOisSpread curve")

    def spreads_on(self, tenor: TenorStructure) -> np.ndarray:
        try:
            return self.libor_ois_spreads.on(tenor)
        except KeyError as exc:
            raise QuoteGap(0, f"USD LIBOR-OIS spreads do not cover the tenor grid ({exc})") from None


def _dense(values: Sequence[float | None], tenor: TenorStructure, name: str) -> np.ndarray:
    if len(values) != tenor.size:
        raise QuoteGap(min(len(values), tenor.size) + 1,
                       f"{name} has {len(values)} quotes for {tenor.size} pillars")
    out = np.empty(tenor.size)
    for i, v in enumerate(values):
        if v is None or not math.isfinite(v):
            raise QuoteGap(i + 1, name)
        out[i] = v
    return out


@dataclass(frozen=True)
class SiloQuotesLibor:
    tenor: TenorStructure
    irs_par_rates: tuple[float, ...]
    ccs_basis: tuple[float, ...]
    day_count_ratio: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "irs_par_rates", tuple(_dense(self.irs_par_rates, self.tenor, "IRS")))
        object.__setattr__(self, "ccs_basis", tuple(_dense(self.ccs_basis, self.tenor, "MTMCCS")))
        if self.day_count_ratio is None:
            object.__setattr__(self, "day_count_ratio", self.tenor.day_count_ratio())


@dataclass(frozen=True)
class SiloQuotesOis:
    tenor: TenorStructure
    ois_par_rates: tuple[float, ...]
    ccois_basis: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ois_par_rates", tuple(_dense(self.ois_par_rates, self.tenor, "OIS")))
        object.__setattr__(self, "ccois_basis", tuple(_dense(self.ccois_basis, self.tenor, "MTMCCOIS")))


def _curve(tenor: TenorStructure, df_start: float, dfs: np.ndarray) -> DiscountCurve:
    if tenor.start == 0.0:
        if df_start != 1.0:
            raise ValueError("spot-start grid requires a unit discount factor at T_0")
        return DiscountCurve(tenor.pillars, tuple(dfs))
    return DiscountCurve((tenor.start,) + tenor.pillars, (df_start,) + tuple(dfs))


def _check(index: int, value: float, denominator: float) -> None:
    if not denominator > 0:
        raise NonPositiveDiscount(index, value)
    if not value > 0:
        raise NonPositiveDiscount(index, value)


def usd_ois_from_par_rates(
    tenor: TenorStructure, ois_rates: Sequence[float], df_at_start: float = 1.0
) -> DiscountCurve:
    """USD OIS discount curve from dense par rates (USD-collateralized, so D = Dbar).

    Uses the USD floating accruals when the tenor carries them.
    """
    rates = _dense(ois_rates, tenor, "USDOIS")
    delta = np.array(tenor.usd_accruals)
    dfs = np.empty(tenor.size)
    annuity = 0.0
    for k in range(tenor.size):
        denom = 1.0 + delta[k] * rates[k]
        value = (df_at_start - rates[k] * annuity) / denom
        _check(k + 1, value, denom)
        dfs[k] = value
        annuity += delta[k] * value
    return _curve(tenor, df_at_start, dfs)


def bootstrap_effective_discount_libor(
    quotes: SiloQuotesLibor, usd: UsdDomesticCurves, df_at_start: float = 1.0
) -> DiscountCurve:
    """Effective discount curve Dbar^(j) from IRS and MtMCCS quotes.

    For each M the par condition of the M-period MtMCCS, with the IRS rate
    substituted for the j-leg LIBORs, is linear in Dbar(0, T_M):

        Dbar_M (1 + Delta_M S_M + delta_M B_M)
            = Dbar_0 - (r S_M + B_M) sum_{m<M} delta_m Dbar_m
              + sum_{m<=M} delta^usd_m D^usd(0; T_{m-1}, T_m) B^usd_m Dbar_{m-1}

    with r the constant fixed/float day-count ratio.
    """
    tenor = quotes.tenor
    times = tenor.times
    s = np.array(quotes.irs_par_rates)
    b = np.array(quotes.ccs_basis)
    ratio = float(quotes.day_count_ratio)
    big_delta = np.array(tenor.fixed_accruals)
    delta = np.array(tenor.float_accruals)
    delta_usd = np.array(tenor.usd_accruals)
    usd_spread = usd.spreads_on(tenor)

    dfs = np.empty(tenor.size)
    prev = df_at_start
    annuity = 0.0
    usd_leg = 0.0
    for k in range(tenor.size):
        fwd = forward_df(usd.ois_discount, times[k], times[k + 1])
        usd_leg += delta_usd[k] * fwd * usd_spread[k] * prev
        denom = 1.0 + big_delta[k] * s[k] + delta[k] * b[k]
        value = (df_at_start - (ratio * s[k] + b[k]) * annuity + usd_leg) / denom
        _check(k + 1, value, denom)
        dfs[k] = value
        annuity += delta[k] * value
        prev = value
    return _curve(tenor, df_at_start, dfs)


def _forwards_from_par(
    tenor: TenorStructure,
    dbar: DiscountCurve,
    par: np.ndarray,
    fixed_accruals: np.ndarray,
    kind: ForwardKind,
) -> ForwardCurve:
    # the floating leg is discounted at the payment date T_m, as in the IRS
    # par condition; see the decisions ledger on the T_{m-1} variant
    delta = np.array(tenor.float_accruals)
    d = dbar.dfs_at(tenor.pillars)
    fixed_annuity = np.cumsum(fixed_accruals * d)
    fwd = np.empty(tenor.size)
    float_leg = 0.0
    for k in range(tenor.size):
        fwd[k] = (par[k] * fixed_annuity[k] - float_leg) / (delta[k] * d[k])
        float_leg += delta[k] * d[k] * fwd[k]
    return ForwardCurve.on_tenor(tenor, fwd, kind)


def extract_libor_forwards(quotes: SiloQuotesLibor, dbar: DiscountCurve) -> ForwardCurve:
    """Currency-j LIBOR forwards E^{Q_Tm}[L(T_{m-1}, T_m)] implied by the IRS quotes."""
    return _forwards_from_par(
        quotes.tenor, dbar, np.array(quotes.irs_par_rates),
        np.array(quotes.tenor.fixed_accruals), ForwardKind.LIBOR_FORWARD,
    )


def bootstrap_effective_discount_ois(quotes: SiloQuotesOis, df_at_start: float = 1.0) -> DiscountCurve:
    """Effective discount curve from OIS rates plus MtMCCOIS spreads.

    Since the USD leg is worth zero, S^ois_M + B^ois_M is the effective
    swap rate of the first M periods and the recursion is that of a plain
    single-curve par bootstrap.
    """
    tenor = quotes.tenor
    total = np.array(quotes.ois_par_rates) + np.array(quotes.ccois_basis)
    delta = np.array(tenor.float_accruals)
    dfs = np.empty(tenor.size)
    annuity = 0.0
    for k in range(tenor.size):
        denom = 1.0 + delta[k] * total[k]
        value = (df_at_start - total[k] * annuity) / denom
        _check(k + 1, value, denom)
        dfs[k] = value
        annuity += delta[k] * value
    return _curve(tenor, df_at_start, dfs)


def ois_forwards_from_curve(dbar: DiscountCurve, quotes: SiloQuotesOis) -> ForwardCurve:
    """Expected compounded-OIS period rates implied by OIS par rates on ``dbar``.

    OIS fixed and floating legs share the floating accruals.
    """
    tenor = quotes.tenor
    return _forwards_from_par(
        tenor, dbar, np.array(quotes.ois_par_rates),
        np.array(tenor.float_accruals), ForwardKind.COMPOUNDED_OIS_FORWARD,
    )
