"""Curve-based valuation under USD collateralization.

Swap formulas run over a slice of a ``TenorStructure``: periods S+1..M
(1-based), i.e. the swap starts at T_S and matures at T_M.

FX orientation is spelled out in every name. ``usd_per_j`` is
f_x^{(i,j)} (units of USD for one unit of currency j); ``j_per_usd`` is its
reciprocal f_x^{(j,i)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bootstrap import UsdDomesticCurves
from .errors import EmptyAnnuity, MissingCurve, NonPositiveForward
from .termstructure import DiscountCurve, ForwardCurve, TenorStructure, forward_df


@dataclass(frozen=True)
class CurveSet:
    currency: str
    dbar: DiscountCurve
    libor: ForwardCurve | None = None
    ois: ForwardCurve | None = None
    usd: UsdDomesticCurves | None = None
    fx_spot_usd_per_j: float | None = None
    currency_k: str | None = None
    dbar_k: DiscountCurve | None = None
    fx_spot_usd_per_k: float | None = None
    usd_label: str = "USD"

    def __post_init__(self) -> None:
        for spot in (self.fx_spot_usd_per_j, self.fx_spot_usd_per_k):
            if spot is not None and not spot > 0:
                raise ValueError("FX spot must be positive")
        curves = [self.dbar, self.dbar_k]
        if self.usd is not None:
            curves.append(self.usd.ois_discount)
        anchors = {c.anchor for c in curves if c is not None}
        if len(anchors) > 1:
            raise ValueError("all curves must share the anchor")

    def need_usd(self) -> UsdDomesticCurves:
        if self.usd is None:
            raise MissingCurve("USD domestic curves are required")
        return self.usd

    def need_libor(self) -> ForwardCurve:
        if self.libor is None:
            raise MissingCurve(f"{self.currency} LIBOR forwards are required")
        return self.libor

    def need_ois(self) -> ForwardCurve:
        if self.ois is None:
            raise MissingCurve(f"{self.currency} OIS forwards are required")
        return self.ois

    def need_spot(self) -> float:
        if self.fx_spot_usd_per_j is None:
            raise MissingCurve(f"FX spot {self.usd_label}/{self.currency} is required")
        return self.fx_spot_usd_per_j

    def need_k(self) -> tuple[DiscountCurve, float]:
        if self.dbar_k is None or self.fx_spot_usd_per_k is None:
            raise MissingCurve("second-currency curve and FX spot are required")
        return self.dbar_k, self.fx_spot_usd_per_k


def _slice(tenor: TenorStructure, start: int, end: int) -> None:
    if not 0 <= start < end <= tenor.size:
        raise ValueError(f"invalid period slice ({start}, {end}] for {tenor.size} periods")


def _dfs(curve: DiscountCurve, tenor: TenorStructure, start: int, end: int) -> np.ndarray:
    """Dbar(0, T_m) for m = start+1..end."""
    return curve.dfs_at(tenor.pillars[start:end])


def _ratio(value: float, annuity: float) -> float:
    if annuity == 0.0:
        raise EmptyAnnuity("annuity is zero")
    return value / annuity


def annuity(dbar: DiscountCurve, tenor: TenorStructure, start: int, end: int) -> float:
    """sum_{m=start+1}^{end} delta_m Dbar(0, T_m) with floating accruals."""
    _slice(tenor, start, end)
    return float(np.dot(tenor.float_accruals[start:end], _dfs(dbar, tenor, start, end)))


def irs_par_rate(cs: CurveSet, tenor: TenorStructure, end: int, start: int = 0) -> float:
    _slice(tenor, start, end)
    d = _dfs(cs.dbar, tenor, start, end)
    fwd = cs.need_libor().on(tenor, start + 1, end)
    num = float(np.dot(np.array(tenor.float_accruals[start:end]) * d, fwd))
    return _ratio(num, float(np.dot(tenor.fixed_accruals[start:end], d)))


def effective_swap_rate(dbar: DiscountCurve, tenor: TenorStructure, start: int, end: int) -> float:
    """Par rate of a fixed-versus-effective-discount-rate swap over T_start..T_end."""
    num = dbar.df(tenor.times[start]) - dbar.df(tenor.times[end])
    return _ratio(num, annuity(dbar, tenor, start, end))


def usd_spread_leg(cs: CurveSet, tenor: TenorStructure, end: int, start: int = 0) -> float:
    """Approximate PV (in currency j, per unit notional) of the MtMCCS USD leg.

    sum delta^usd_m D^usd(0; T_{m-1}, T_m) B^usd(0; T_{m-1}, T_m) Dbar(0, T_{m-1}),
    which drops the LIBOR-OIS/FX covariance and the one-period timing
    adjustment of the reset FX rate.
    """
    usd = cs.need_usd()
    _slice(tenor, start, end)
    t = tenor.times
    spreads = usd.libor_ois_spreads.on(tenor, start + 1, end)
    total = 0.0
    for m in range(start + 1, end + 1):
        fwd = forward_df(usd.ois_discount, t[m - 1], t[m])
        total += tenor.usd_accruals[m - 1] * fwd * spreads[m - start - 1] * cs.dbar.df(t[m - 1])
    return total


def mtmccs_leg_pvs(
    cs: CurveSet,
    tenor: TenorStructure,
    end: int,
    spread: float,
    start: int = 0,
    day_count_ratio: float | None = None,
) -> tuple[float, float]:
    """(PV of the j leg, PV of the USD leg in j) per unit j notional.

    The j leg pays LIBOR + spread with notional exchanges; its LIBOR coupons
    are replaced by the IRS par rate scaled by the day-count ratio.
    """
    ratio = tenor.day_count_ratio() if day_count_ratio is None else day_count_ratio
    s = irs_par_rate(cs, tenor, end, start)
    a = annuity(cs.dbar, tenor, start, end)
    t = tenor.times
    pv_j = -cs.dbar.df(t[start]) + cs.dbar.df(t[end]) + (ratio * s + spread) * a
    return pv_j, usd_spread_leg(cs, tenor, end, start)


def mtmccs_par_spread(
    cs: CurveSet,
    tenor: TenorStructure,
    end: int,
    start: int = 0,
    day_count_ratio: float | None = None,
) -> float:
    ratio = tenor.day_count_ratio() if day_count_ratio is None else day_count_ratio
    a = annuity(cs.dbar, tenor, start, end)
    sbar = effective_swap_rate(cs.dbar, tenor, start, end)
    s = irs_par_rate(cs, tenor, end, start)
    return (sbar - ratio * s) + _ratio(usd_spread_leg(cs, tenor, end, start), a)


def fx_forward_usd(cs: CurveSet, t: float) -> float:
    """Forward FX in USD per unit of j: spot * Dbar^(j)(0,T) / D^usd(0,T)."""
    spot = cs.need_spot()
    return spot * cs.dbar.df(t) / cs.need_usd().ois_discount.df(t)


def fx_forward_j_per_usd(cs: CurveSet, t: float) -> float:
    return 1.0 / fx_forward_usd(cs, t)


def fx_forward_usd_per_k(cs: CurveSet, t: float) -> float:
    dbar_k, spot_k = cs.need_k()
    return spot_k * dbar_k.df(t) / cs.need_usd().ois_discount.df(t)


def fx_spot_cross(cs: CurveSet) -> float:
    """Units of j per unit of k today."""
    _, spot_k = cs.need_k()
    return spot_k / cs.need_spot()


def fx_forward_cross(cs: CurveSet, t: float) -> float:
    """Forward FX in units of j per unit of k: spot * Dbar^(k)(0,T) / Dbar^(j)(0,T)."""
    dbar_k, _ = cs.need_k()
    return fx_spot_cross(cs) * dbar_k.df(t) / cs.dbar.df(t)


def forward_ois_rate(cs: CurveSet, tenor: TenorStructure, start: int, end: int) -> float:
    _slice(tenor, start, end)
    d = _dfs(cs.dbar, tenor, start, end)
    w = np.array(tenor.float_accruals[start:end]) * d
    fwd = cs.need_ois().on(tenor, start + 1, end)
    return _ratio(float(np.dot(w, fwd)), float(w.sum()))


def ois_par_rate(cs: CurveSet, tenor: TenorStructure, end: int) -> float:
    return forward_ois_rate(cs, tenor, 0, end)


def mtmccois_par_spread(cs: CurveSet, tenor: TenorStructure, start: int, end: int) -> float:
    """Effective swap rate minus OIS rate on the same annuity."""
    return effective_swap_rate(cs.dbar, tenor, start, end) - forward_ois_rate(cs, tenor, start, end)


def usd_leg_pv_mtmccois() -> float:
    # USD overnight coupons collateralized in USD are worth par
    return 0.0


def mtmccois_leg_pvs(
    cs: CurveSet, tenor: TenorStructure, start: int, end: int, spread: float
) -> tuple[float, float]:
    a = annuity(cs.dbar, tenor, start, end)
    t = tenor.times
    s = forward_ois_rate(cs, tenor, start, end)
    pv_j = -cs.dbar.df(t[start]) + cs.dbar.df(t[end]) + (s + spread) * a
    return pv_j, usd_leg_pv_mtmccois()


def overlay_rate_domestic(
    fx_spot_usd_per_j: float, fx_forward_point: float, usd_overnight: float, accrual: float
) -> float:
    """Adjusted collateral rate for posting currency j instead of USD.

    Inverts the USD-collateralized FX forward over one short period with
    simple compounding: (1 + accrual * rate) = (1 + accrual * c_usd) * spot / forward,
    where forward = spot + point, both in USD per unit of j.
    """
    if not accrual > 0:
        raise ValueError("accrual must be positive")
    if not fx_spot_usd_per_j > 0:
        raise ValueError("FX spot must be positive")
    forward = fx_spot_usd_per_j + fx_forward_point
    if not forward > 0:
        raise NonPositiveForward(f"FX forward {forward!r} is not positive")
    return ((1.0 + accrual * usd_overnight) * fx_spot_usd_per_j / forward - 1.0) / accrual


def implied_overlay_inputs(
    dbar: DiscountCurve, usd_ois: DiscountCurve, fx_spot_usd_per_j: float, t1: float, t2: float
) -> tuple[float, float, float, float]:
    """(spot, forward point, USD overnight, accrual) the curves imply for [t1, t2].

    ``spot`` is the outright for t1, so forward-starting periods work too.
    """
    accrual = t2 - t1
    f1 = fx_spot_usd_per_j * forward_df(dbar, 0.0, t1) / forward_df(usd_ois, 0.0, t1)
    f2 = fx_spot_usd_per_j * forward_df(dbar, 0.0, t2) / forward_df(usd_ois, 0.0, t2)
    usd_rate = (1.0 / forward_df(usd_ois, t1, t2) - 1.0) / accrual
    return f1, f2 - f1, usd_rate, accrual


def overlay_rate_third_currency(cs: CurveSet, t_short: float, t_start: float = 0.0) -> float:
    """Adjusted collateral rate for posting a second non-USD currency k.

    Equals the effective USD-collateralized rate of k; it is read off the
    (k, USD) FX swap implied by ``dbar_k`` and the USD OIS curve.
    """
    dbar_k, spot_k = cs.need_k()
    inputs = implied_overlay_inputs(dbar_k, cs.need_usd().ois_discount, spot_k, t_start, t_short)
    return overlay_rate_domestic(*inputs)


def compound_overlay_rates(rates: Sequence[float], accruals: Sequence[float]) -> float:
    """Growth factor prod(1 + accrual * rate) of a strip of overlay fixings."""
    return math.prod(1.0 + a * r for r, a in zip(rates, accruals))
