"""JSON reading and writing for curves, tenors and reports.

Floats are written with 17 significant digits so that every value
round-trips exactly. The stdlib encoder always uses ``repr`` for floats,
hence the small hand-rolled emitter below.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .termstructure import DiscountCurve, ForwardCurve, ForwardKind, TenorStructure

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        # JSON has no literal for these; reports use null
        return "null"
    text = f"{x:.17g}"
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text (keys keep insertion order) ending in a newline."""
    return _emit(obj, indent, 0) + "\n"


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return _emit(obj.item(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return _emit(obj.tolist(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def curve_to_dict(curve: DiscountCurve) -> dict:
    return {
        "anchor": curve.anchor,
        "pillars": [{"t": t, "df": d} for t, d in zip(curve.times, curve.dfs)],
        "interp": curve.interp,
    }


def curve_from_dict(data: dict, extrapolate: bool = False) -> DiscountCurve:
    pillars = data["pillars"]
    return DiscountCurve(
        times=tuple(float(p["t"]) for p in pillars),
        dfs=tuple(float(p["df"]) for p in pillars),
        anchor=float(data.get("anchor", 0.0)),
        interp=data.get("interp", "log_linear"),
        extrapolate=extrapolate,
    )


def forward_to_dict(curve: ForwardCurve) -> dict:
    return {
        "kind": curve.kind.value,
        "periods": [{"start": a, "end": b, "value": v} for (a, b), v in zip(curve.periods, curve.values)],
    }


def forward_from_dict(data: dict) -> ForwardCurve:
    periods = data["periods"]
    return ForwardCurve(
        periods=tuple((float(p["start"]), float(p["end"])) for p in periods),
        values=tuple(float(p["value"]) for p in periods),
        kind=ForwardKind(data["kind"]),
    )


def tenor_to_dict(tenor: TenorStructure) -> dict:
    return {
        "start": tenor.start,
        "pillars": list(tenor.pillars),
        "fixedAccruals": list(tenor.fixed_accruals),
        "floatAccruals": list(tenor.float_accruals),
        "floatAccrualsUsd": list(tenor.float_accruals_usd) if tenor.float_accruals_usd is not None else None,
    }


def tenor_from_dict(data: dict) -> TenorStructure:
    usd = data.get("floatAccrualsUsd")
    return TenorStructure(
        start=float(data["start"]),
        pillars=tuple(data["pillars"]),
        fixed_accruals=tuple(data["fixedAccruals"]),
        float_accruals=tuple(data["floatAccruals"]),
        float_accruals_usd=tuple(usd) if usd is not None else None,
    )


def curveset_to_dict(cs, tenor: TenorStructure, route: str | None = None,
                     day_count_ratio: float | None = None) -> dict:
    """Curve-set file body: every curve the pricer needs plus the tenor it was built on."""
    out: dict[str, Any] = {"schemaVersion": SCHEMA_VERSION, "currency": cs.currency}
    if route is not None:
        out["route"] = route
    out["fxSpotUsdPerJ"] = cs.fx_spot_usd_per_j
    out["dayCountRatio"] = tenor.day_count_ratio() if day_count_ratio is None else day_count_ratio
    out["tenor"] = tenor_to_dict(tenor)
    out["dbar"] = curve_to_dict(cs.dbar)
    out["liborForwards"] = forward_to_dict(cs.libor) if cs.libor is not None else None
    out["oisForwards"] = forward_to_dict(cs.ois) if cs.ois is not None else None
    out["usdOis"] = curve_to_dict(cs.usd.ois_discount) if cs.usd is not None else None
    out["usdLois"] = forward_to_dict(cs.usd.libor_ois_spreads) if cs.usd is not None else None
    return out


def curveset_from_dict(data: dict, extrapolate: bool = False, second: dict | None = None):
    """(CurveSet, TenorStructure, day-count ratio); ``second`` adds currency k from another file."""
    from .bootstrap import UsdDomesticCurves
    from .pricing import CurveSet

    if data.get("schemaVersion") != SCHEMA_VERSION:
        raise ValueError(f"unsupported curve file schemaVersion {data.get('schemaVersion')!r}")
    tenor = tenor_from_dict(data["tenor"])
    usd = None
    if data.get("usdOis") is not None:
        usd = UsdDomesticCurves(curve_from_dict(data["usdOis"], extrapolate),
                                forward_from_dict(data["usdLois"]))
    kwargs: dict[str, Any] = {}
    if second is not None:
        kwargs = {
            "currency_k": second["currency"],
            "dbar_k": curve_from_dict(second["dbar"], extrapolate),
            "fx_spot_usd_per_k": second["fxSpotUsdPerJ"],
        }
    cs = CurveSet(
        data["currency"],
        curve_from_dict(data["dbar"], extrapolate),
        libor=forward_from_dict(data["liborForwards"]) if data.get("liborForwards") else None,
        ois=forward_from_dict(data["oisForwards"]) if data.get("oisForwards") else None,
        usd=usd,
        fx_spot_usd_per_j=data.get("fxSpotUsdPerJ"),
        **kwargs,
    )
    return cs, tenor, float(data.get("dayCountRatio", 1.0))
