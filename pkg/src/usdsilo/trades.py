"""Trade records and curve-based trade valuation.

Trade file (JSON)::

    {"schemaVersion": 1, "trades": [
        {"id": "irs5y", "type": "IRS", "start": 0, "end": 20, "rate": 0.05, "payer": true},
        {"id": "ccs5y", "type": "MTMCCS", "end": 20, "spread": -0.002},
        {"id": "fx1y", "type": "FXFORWARD", "maturity": 1.0, "strike": 0.0124},
        ...
    ]}

Swap ``start``/``end`` are period indices on the curve file's tenor. A swap
without ``rate``/``spread`` is struck at par. ``payer`` means paying the
fixed rate (IRS, OIS) or paying the currency-j leg (MTMCCS, MTMCCOIS).
FX forwards buy ``notional`` units of the foreign currency at ``strike``:
FXFORWARD quotes USD per unit of j (or of k with ``"currency": "K"``) and is
valued in USD; FXCROSS quotes j per unit of k and is valued in j.
SWAPTION records report the zero-volatility (intrinsic) value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from . import pricing
from .errors import DataInconsistency, InputError
from .termstructure import TenorStructure

log = logging.getLogger(__name__)

SWAP_TYPES = ("IRS", "OIS", "MTMCCS", "MTMCCOIS")
FX_TYPES = ("FXFORWARD", "FXCROSS")
SWAPTION_KINDS = ("OisPayer", "OisReceiver", "BasisSpreadPayer", "BasisSpreadReceiver")
TRADE_TYPES = SWAP_TYPES + FX_TYPES + ("SWAPTION",)


@dataclass(frozen=True)
class Trade:
    id: str
    type: str
    notional: float = 1.0
    start: int = 0
    end: int = 0
    rate: float | None = None
    payer: bool = True
    maturity: float = 0.0
    strike: float | None = None
    currency: str = "J"
    kind: str = ""
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def parse_trade(obj: Any, index: int) -> Trade:
    if not isinstance(obj, dict):
        raise InputError(f"trade {index}: expected an object")
    ttype = str(obj.get("type", "")).upper()
    if ttype not in TRADE_TYPES:
        raise InputError(f"trade {index}: unknown type {obj.get('type')!r}")
    tid = str(obj.get("id", f"trade{index}"))
    try:
        rate = obj.get("rate", obj.get("spread"))
        strike = obj.get("strike")
        return Trade(
            id=tid,
            type=ttype,
            notional=float(obj.get("notional", 1.0)),
            start=int(obj.get("start", 0)),
            end=int(obj.get("end", 0)),
            rate=None if rate is None else float(rate),
            payer=bool(obj.get("payer", True)),
            maturity=float(obj.get("maturity", 0.0)),
            strike=None if strike is None else float(strike),
            currency=str(obj.get("currency", "J")).upper(),
            kind=str(obj.get("kind", "")),
            raw=obj,
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"trade {tid}: {exc}") from None


def parse_trades(data: Any) -> list[Trade | InputError]:
    """Parsed trades; a malformed record becomes its InputError so the batch still runs."""
    if isinstance(data, dict):
        data = data.get("trades")
    if not isinstance(data, list):
        raise InputError("trade file needs a 'trades' list")
    out: list[Trade | InputError] = []
    for i, obj in enumerate(data):
        try:
            out.append(parse_trade(obj, i))
        except InputError as exc:
            out.append(exc)
    return out


def _swap(cs: pricing.CurveSet, tenor: TenorStructure, tr: Trade, ratio: float) -> dict:
    s, m = tr.start, tr.end
    sign = 1.0 if tr.payer else -1.0
    if tr.type == "IRS":
        par = pricing.irs_par_rate(cs, tenor, m, s)
        k = par if tr.rate is None else tr.rate
        fixed_annuity = sum(a * cs.dbar.df(t) for a, t in
                            zip(tenor.fixed_accruals[s:m], tenor.pillars[s:m]))
        floating = par * fixed_annuity
        fixed = k * fixed_annuity
        legs = {"floating": floating, "fixed": fixed}
        pv = sign * (floating - fixed)
    elif tr.type == "OIS":
        par = pricing.forward_ois_rate(cs, tenor, s, m)
        k = par if tr.rate is None else tr.rate
        a = pricing.annuity(cs.dbar, tenor, s, m)
        legs = {"floating": par * a, "fixed": k * a}
        pv = sign * (par - k) * a
    elif tr.type == "MTMCCS":
        par = pricing.mtmccs_par_spread(cs, tenor, m, s, day_count_ratio=ratio)
        k = par if tr.rate is None else tr.rate
        pv_j, pv_usd = pricing.mtmccs_leg_pvs(cs, tenor, m, k, s, day_count_ratio=ratio)
        legs = {"legJ": pv_j, "legUsd": pv_usd}
        pv = sign * (pv_usd - pv_j)
    else:
        par = pricing.mtmccois_par_spread(cs, tenor, s, m)
        k = par if tr.rate is None else tr.rate
        pv_j, pv_usd = pricing.mtmccois_leg_pvs(cs, tenor, s, m, k)
        legs = {"legJ": pv_j, "legUsd": pv_usd}
        pv = sign * (pv_usd - pv_j)
    n = tr.notional
    return {"pv": n * pv, "par": par, "fixed": k,
            "legs": {name: n * v for name, v in legs.items()}, "pvCurrency": cs.currency}


def _fx(cs: pricing.CurveSet, tr: Trade) -> dict:
    t = tr.maturity
    usd = cs.need_usd().ois_discount
    if tr.type == "FXFORWARD":
        if tr.currency == "K":
            dbar_k, spot = cs.need_k()
            fwd = pricing.fx_forward_usd_per_k(cs, t)
            foreign = spot * dbar_k.df(t)
        else:
            spot = cs.need_spot()
            fwd = pricing.fx_forward_usd(cs, t)
            foreign = spot * cs.dbar.df(t)
        strike = fwd if tr.strike is None else tr.strike
        paid = strike * usd.df(t)
        ccy = cs.usd_label
    else:
        dbar_k, _ = cs.need_k()
        fwd = pricing.fx_forward_cross(cs, t)
        foreign = pricing.fx_spot_cross(cs) * dbar_k.df(t)
        strike = fwd if tr.strike is None else tr.strike
        paid = strike * cs.dbar.df(t)
        ccy = cs.currency
    n = tr.notional
    sign = 1.0 if tr.payer else -1.0
    return {"pv": sign * n * (foreign - paid), "par": fwd, "fixed": strike,
            "legs": {"receive": n * foreign, "pay": n * paid}, "pvCurrency": ccy}


def _swaption(cs: pricing.CurveSet, tenor: TenorStructure, tr: Trade) -> dict:
    if tr.kind not in SWAPTION_KINDS:
        raise InputError(f"swaption kind must be one of {SWAPTION_KINDS}")
    s, m = tr.start, tr.end
    a0 = pricing.annuity(cs.dbar, tenor, s, m)
    if tr.kind.startswith("Basis"):
        fwd = pricing.mtmccois_par_spread(cs, tenor, s, m)
    else:
        fwd = pricing.forward_ois_rate(cs, tenor, s, m)
    strike = fwd if tr.strike is None else tr.strike
    sign = 1.0 if tr.kind.endswith("Payer") else -1.0
    value = a0 * max(sign * (fwd - strike), 0.0)
    return {"pv": tr.notional * value, "par": fwd, "fixed": strike,
            "legs": {"annuity": tr.notional * a0}, "pvCurrency": cs.currency}


def price_trade(cs: pricing.CurveSet, tenor: TenorStructure, tr: Trade, day_count_ratio: float) -> dict:
    if tr.type in SWAP_TYPES:
        body = _swap(cs, tenor, tr, day_count_ratio)
    elif tr.type in FX_TYPES:
        body = _fx(cs, tr)
    else:
        body = _swaption(cs, tenor, tr)
    return {"id": tr.id, "type": tr.type, "status": "ok", "notional": tr.notional, **body}


def price_trades(cs: pricing.CurveSet, tenor: TenorStructure, trades: list, day_count_ratio: float
                 ) -> list[dict]:
    """Price every trade; failures are reported per trade and do not stop the batch."""
    rows = []
    for i, tr in enumerate(trades):
        if isinstance(tr, InputError):
            rows.append({"id": f"trade{i}", "type": None, "status": "error",
                         "errorClass": "InputError", "error": str(tr)})
            continue
        try:
            rows.append(price_trade(cs, tenor, tr, day_count_ratio))
        except (DataInconsistency, InputError, ValueError) as exc:
            log.warning("trade %s failed: %s", tr.id, exc)
            rows.append({"id": tr.id, "type": tr.type, "status": "error",
                         "errorClass": type(exc).__name__, "error": str(exc)})
    return rows


def triangle_table(cs: pricing.CurveSet, trades: list) -> list[dict]:
    """USD/j, j/k and USD/k forwards at every FX trade maturity, with the product residual."""
    if cs.dbar_k is None or cs.usd is None or cs.fx_spot_usd_per_j is None:
        return []
    maturities = sorted({tr.maturity for tr in trades if isinstance(tr, Trade) and tr.type in FX_TYPES})
    rows = []
    for t in maturities:
        try:
            f_ij = pricing.fx_forward_usd(cs, t)
            f_jk = pricing.fx_forward_cross(cs, t)
            f_ik = pricing.fx_forward_usd_per_k(cs, t)
        except DataInconsistency as exc:
            rows.append({"maturity": t, "status": "error", "error": str(exc)})
            continue
        rows.append({"maturity": t, "usdPerJ": f_ij, "jPerK": f_jk, "usdPerK": f_ik,
                     "residual": f_ij * f_jk / f_ik - 1.0})
    return rows
