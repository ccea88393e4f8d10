"""Quote-file ingestion and curve-set assembly.

Quote CSV layout (header row required)::

    instrument,maturityYears,value
    IRS,1,0.0312
    MTMCCS,1,-0.0015
    USDOIS,1,0.0301
    USDLOIS,1,0.0020
    ...

Rate instruments: IRS, MTMCCS, OIS, MTMCCOIS, USDOIS (par rates) and USDLOIS
(forward LIBOR-OIS spread of the USD period ending at ``maturityYears``).
Optional convention rows, maturity ignored: FREQ (periods per year, default
4), FXSPOT (USD per unit of currency j), DAYCOUNT_FIXED / DAYCOUNT_FLOAT /
DAYCOUNT_USD (360 or 365; default 365, i.e. accruals equal year fractions).

Sparse maturities are linearly interpolated in quote space onto the full
pillar grid, held flat before the first quote. Maturities past the last
quote are a gap.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bootstrap, pricing
from .errors import InputError, QuoteGap
from .termstructure import DayCount, DiscountCurve, ForwardCurve, ForwardKind, TenorStructure

RATE_INSTRUMENTS = ("IRS", "MTMCCS", "OIS", "MTMCCOIS", "USDOIS", "USDLOIS")
META_INSTRUMENTS = ("FREQ", "FXSPOT", "DAYCOUNT_FIXED", "DAYCOUNT_FLOAT", "DAYCOUNT_USD")
ROUTE_INSTRUMENTS = {
    "libor": ("IRS", "MTMCCS", "USDOIS", "USDLOIS"),
    "ois": ("OIS", "MTMCCOIS"),
}
RESIDUAL_FLAG = 1e-8


@dataclass
class QuoteSet:
    quotes: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    frequency: int = 4
    fx_spot_usd_per_j: float | None = None
    fixed_daycount: DayCount = DayCount.ACT_365F
    float_daycount: DayCount = DayCount.ACT_365F
    usd_daycount: DayCount = DayCount.ACT_365F

    def has(self, instrument: str) -> bool:
        return bool(self.quotes.get(instrument))

    def last_maturity(self, instruments) -> float:
        return max(m for name in instruments for m, _ in self.quotes.get(name, []))

    def tenor(self, instruments) -> TenorStructure:
        n = int(round(self.last_maturity(instruments) * self.frequency))
        return TenorStructure.regular(
            n, self.frequency,
            fixed_daycount=self.fixed_daycount,
            float_daycount=self.float_daycount,
            usd_daycount=self.usd_daycount,
        )


def parse_quotes(text: str, source: str = "<quotes>") -> QuoteSet:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r) and not r[0].lstrip().startswith("#")]
    if not rows:
        raise InputError(f"{source}: empty quote file")
    header = [c.strip() for c in rows[0]]
    if header[:3] != ["instrument", "maturityYears", "value"]:
        raise InputError(f"{source}: expected header instrument,maturityYears,value; got {header}")
    if len(rows) == 1:
        raise InputError(f"{source}: quote file has a header but no quotes")

    qs = QuoteSet()
    found: dict[str, dict[float, float]] = defaultdict(dict)
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) < 3:
            raise InputError(f"{source}:{lineno}: expected 3 columns")
        name = row[0].strip().upper()
        try:
            maturity = float(row[1])
            value = float(row[2])
        except ValueError:
            raise InputError(f"{source}:{lineno}: non-numeric maturity or value") from None
        if not (math.isfinite(maturity) and math.isfinite(value)):
            raise InputError(f"{source}:{lineno}: non-finite number")
        if name in RATE_INSTRUMENTS:
            if not maturity > 0:
                raise InputError(f"{source}:{lineno}: maturity must be positive")
            if maturity in found[name]:
                raise InputError(f"{source}:{lineno}: duplicate {name} quote at {maturity}")
            found[name][maturity] = value
        elif name == "FREQ":
            if value != int(value) or value < 1:
                raise InputError(f"{source}:{lineno}: FREQ must be a positive integer")
            qs.frequency = int(value)
        elif name == "FXSPOT":
            if not value > 0:
                raise InputError(f"{source}:{lineno}: FXSPOT must be positive")
            qs.fx_spot_usd_per_j = value
        elif name.startswith("DAYCOUNT_"):
            try:
                dc = DayCount.parse(row[2])
            except ValueError as exc:
                raise InputError(f"{source}:{lineno}: {exc}") from None
            attr = {"DAYCOUNT_FIXED": "fixed_daycount", "DAYCOUNT_FLOAT": "float_daycount",
                    "DAYCOUNT_USD": "usd_daycount"}.get(name)
            if attr is None:
                raise InputError(f"{source}:{lineno}: unknown instrument {name!r}")
            setattr(qs, attr, dc)
        else:
            raise InputError(f"{source}:{lineno}: unknown instrument {name!r}")
    qs.quotes = {k: sorted(v.items()) for k, v in found.items()}

    for name, points in qs.quotes.items():
        for m, _ in points:
            steps = m * qs.frequency
            if abs(steps - round(steps)) > 1e-9:
                raise InputError(f"{source}: {name} maturity {m} is not on the {qs.frequency}/y grid")
    return qs


def read_quotes(path: str | Path) -> QuoteSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read quotes: {exc}") from None
    return parse_quotes(text, str(path))


def densify(points: list[tuple[float, float]], tenor: TenorStructure, name: str = "") -> np.ndarray:
    """Quotes on every pillar, linear in maturity, flat before the first quote."""
    if not points:
        raise QuoteGap(1, f"no {name} quotes")
    mats = np.array([m for m, _ in points])
    vals = np.array([v for _, v in points])
    pillars = np.array(tenor.pillars)
    beyond = np.nonzero(pillars > mats[-1] + 1e-12)[0]
    if beyond.size:
        raise QuoteGap(int(beyond[0]) + 1, f"{name} quotes end at {mats[-1]}")
    return np.interp(pillars, mats, vals)


def detect_route(qs: QuoteSet) -> str:
    if all(qs.has(k) for k in ROUTE_INSTRUMENTS["libor"]):
        return "libor"
    if all(qs.has(k) for k in ROUTE_INSTRUMENTS["ois"]):
        return "ois"
    raise InputError("quotes match neither route: libor needs IRS, MTMCCS, USDOIS, USDLOIS; "
                     "ois needs OIS, MTMCCOIS")


@dataclass(frozen=True)
class BuildResult:
    route: str
    tenor: TenorStructure
    curves: pricing.CurveSet
    quotes: QuoteSet
    day_count_ratio: float


def _usd_curves(qs: QuoteSet, tenor: TenorStructure) -> bootstrap.UsdDomesticCurves:
    usd_rates = densify(qs.quotes["USDOIS"], tenor, "USDOIS")
    usd_curve = bootstrap.usd_ois_from_par_rates(tenor, usd_rates)
    lois = densify(qs.quotes["USDLOIS"], tenor, "USDLOIS")
    return bootstrap.UsdDomesticCurves(
        usd_curve, ForwardCurve.on_tenor(tenor, lois, ForwardKind.LIBOR_OIS_SPREAD)
    )


def build_curves(qs: QuoteSet, route: str | None = None, currency: str = "J") -> BuildResult:
    route = route or detect_route(qs)
    if route not in ROUTE_INSTRUMENTS:
        raise InputError(f"unknown route {route!r}")
    missing = [k for k in ROUTE_INSTRUMENTS[route] if not qs.has(k)]
    if missing:
        raise InputError(f"route {route} needs quotes for {', '.join(missing)}")
    tenor = qs.tenor(ROUTE_INSTRUMENTS[route])
    ratio = qs.float_daycount.denominator / qs.fixed_daycount.denominator

    if route == "libor":
        usd = _usd_curves(qs, tenor)
        silo = bootstrap.SiloQuotesLibor(
            tenor,
            tuple(densify(qs.quotes["IRS"], tenor, "IRS")),
            tuple(densify(qs.quotes["MTMCCS"], tenor, "MTMCCS")),
            ratio,
        )
        dbar = bootstrap.bootstrap_effective_discount_libor(silo, usd)
        libor = bootstrap.extract_libor_forwards(silo, dbar)
        cs = pricing.CurveSet(currency, dbar, libor=libor, usd=usd, fx_spot_usd_per_j=qs.fx_spot_usd_per_j)
    else:
        usd = _usd_curves(qs, tenor) if qs.has("USDOIS") and qs.has("USDLOIS") else None
        silo = bootstrap.SiloQuotesOis(
            tenor,
            tuple(densify(qs.quotes["OIS"], tenor, "OIS")),
            tuple(densify(qs.quotes["MTMCCOIS"], tenor, "MTMCCOIS")),
        )
        dbar = bootstrap.bootstrap_effective_discount_ois(silo)
        ois = bootstrap.ois_forwards_from_curve(dbar, silo)
        cs = pricing.CurveSet(currency, dbar, ois=ois, usd=usd, fx_spot_usd_per_j=qs.fx_spot_usd_per_j)
    return BuildResult(route, tenor, cs, qs, ratio)


def _usd_par(curve: DiscountCurve, tenor: TenorStructure, end: int) -> float:
    d = curve.dfs_at(tenor.pillars[:end])
    return (1.0 - d[-1]) / float(np.dot(tenor.usd_accruals[:end], d))


def repricing_residuals(result: BuildResult) -> list[dict]:
    """Model quote minus market quote for every input quote of the route."""
    cs, tenor, qs = result.curves, result.tenor, result.quotes
    rows = []
    instruments = list(ROUTE_INSTRUMENTS[result.route])
    if result.route == "ois" and cs.usd is not None:
        instruments += ["USDOIS"]
    for name in instruments:
        for maturity, quote in qs.quotes[name]:
            end = int(round(maturity * qs.frequency))
            if name == "IRS":
                model = pricing.irs_par_rate(cs, tenor, end)
            elif name == "MTMCCS":
                model = pricing.mtmccs_par_spread(cs, tenor, end, day_count_ratio=result.day_count_ratio)
            elif name == "OIS":
                model = pricing.ois_par_rate(cs, tenor, end)
            elif name == "MTMCCOIS":
                model = pricing.mtmccois_par_spread(cs, tenor, 0, end)
            elif name == "USDOIS":
                model = _usd_par(cs.usd.ois_discount, tenor, end)
            else:  # USDLOIS is an input curve, not a par instrument
                continue
            residual = model - quote
            rows.append({
                "instrument": name,
                "maturityYears": maturity,
                "quote": quote,
                "model": model,
                "residual": residual,
                "flagged": abs(residual) > RESIDUAL_FLAG,
            })
    return rows
