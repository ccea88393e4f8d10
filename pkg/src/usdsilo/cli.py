"""Command-line front end.

Subcommands: build-curves, price, overlay, simulate, selftest. Reports are
JSON with a ``schemaVersion`` field; the aligned text table printed on
stdout is rendered from that JSON. Exit codes: 0 success, 1 unreadable or
malformed input, 2 inconsistent market data, 3 numerical failure.
Set SILO_LOG (DEBUG, INFO, WARNING, ...) for log verbosity on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any

from . import marketdata, pricing, serialization, trades
from .errors import DataInconsistency, InputError, NonPositiveForward, NumericalFailure, StateExplosion
from .serialization import SCHEMA_VERSION, dumps

log = logging.getLogger("usdsilo")

EXIT_OK, EXIT_INPUT, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


# ---------------------------------------------------------------- file helpers

def _read_json(path: str | Path, what: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {what}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _write(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def load_curve_set(path: str | Path, second: str | Path | None = None, extrapolate: bool = False):
    data = _read_json(path, "curve file")
    other = _read_json(second, "second curve file") if second else None
    try:
        return serialization.curveset_from_dict(data, extrapolate, other)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed curve file ({exc!r})") from None


def _emit_report(report: dict, out: str | None, text: str) -> None:
    if out:
        _write(out, dumps(report))
        sys.stdout.write(text)
    else:
        sys.stdout.write(dumps(report))


# ---------------------------------------------------------------- text rendering

def _cell(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return "-" if v is None else ("yes" if v else "no")
    if isinstance(v, float):
        if not math.isfinite(v):
            return "nan"
        text = f"{v:.6f}"
        return text[1:] if text == "-0.000000" else text
    if isinstance(v, dict):
        return " ".join(f"{k}={_cell(x)}" for k, x in v.items())
    return str(v)


def render_table(rows: list[dict], columns: list[str]) -> str:
    if not rows:
        return "(none)\n"
    body = [[_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(x.rjust(w) for x, w in zip(b, widths)) for b in body]
    return "\n".join(lines) + "\n"


def render(report: dict) -> str:
    """Human table for any report, computed from the JSON text only."""
    report = json.loads(dumps(report))
    cmd = report.get("command")
    out = [f"{cmd} report (schemaVersion {report.get('schemaVersion')})\n"]
    if cmd == "build-curves":
        out.append(f"route {report['route']}, {len(report['pillars'])} pillars\n")
        out.append(render_table(report["pillars"], ["t", "dbar", "zeroRate", "forward"]))
        out.append("re-pricing residuals\n")
        out.append(render_table(report["residuals"], ["instrument", "maturityYears", "quote", "model",
                                                     "residual", "flagged"]))
    elif cmd == "price":
        out.append(render_table(report["trades"], ["id", "type", "status", "pv", "par", "fixed",
                                                  "pvCurrency"]))
        errors = [r for r in report["trades"] if r["status"] != "ok"]
        for r in errors:
            out.append(f"{r['id']}: {r['errorClass']}: {r['error']}\n")
        if report.get("triangle"):
            out.append("FX triangle\n")
            out.append(render_table(report["triangle"], ["maturity", "usdPerJ", "jPerK", "usdPerK",
                                                         "residual"]))
    elif cmd == "overlay":
        out.append(render_table(report["rows"], ["label", "currency", "accrual", "overlayRate",
                                                "status"]))
    elif cmd == "simulate":
        out.append(f"paths {report['paths']}, steps {report['steps']}, seed {report['seed']}\n")
        out.append(render_table(report["swaptions"], ["kind", "start", "end", "strike", "price",
                                                     "stderr", "intrinsic"]))
        if report["parity"]:
            out.append("parity\n")
            out.append(render_table(report["parity"], ["kind", "start", "end", "strike", "estimate",
                                                      "target", "z"]))
        diag = report["diagnostics"]
        out.append(f"diagnostics: {diag['status']}, max |z| {_cell(diag['maxAbsZ'])}\n")
        flagged = [c for c in diag["checks"] if c["status"] != "pass"]
        out.append(render_table(flagged, ["name", "time", "estimate", "target", "z", "status"]))
    elif cmd == "selftest":
        out.append(render_table(report["checks"], ["name", "value", "tolerance", "passed"]))
    return "".join(out)


# ---------------------------------------------------------------- commands

def cmd_build_curves(args: argparse.Namespace) -> int:
    if not args.quotes:
        raise InputError("build-curves needs --quotes")
    qs = marketdata.read_quotes(args.quotes)
    result = marketdata.build_curves(qs, route=args.route, currency=args.currency)
    cs, tenor = result.curves, result.tenor
    curve_doc = serialization.curveset_to_dict(cs, tenor, result.route, result.day_count_ratio)
    pillars = []
    libor = cs.libor.array() if cs.libor is not None else None
    ois = cs.ois.array() if cs.ois is not None else None
    fwd = libor if libor is not None else ois
    for i, t in enumerate(tenor.pillars):
        pillars.append({"t": t, "dbar": cs.dbar.df(t), "zeroRate": cs.dbar.zero_rate(t),
                        "forward": float(fwd[i])})
    residuals = marketdata.repricing_residuals(result)
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "build-curves",
        "route": result.route,
        "currency": cs.currency,
        "pillars": pillars,
        "residuals": residuals,
        "flaggedResiduals": sum(1 for r in residuals if r["flagged"]),
    }
    if args.out:
        _write(args.out, dumps(curve_doc))
    else:
        sys.stdout.write(dumps(curve_doc))
    if args.report:
        _write(args.report, dumps(report))
    if args.out:
        sys.stdout.write(render(report))
    return EXIT_OK


def cmd_price(args: argparse.Namespace) -> int:
    if not args.curves or not args.trades:
        raise InputError("price needs --curves and --trades")
    cs, tenor, ratio = load_curve_set(args.curves, args.curves_k, args.extrapolate)
    book = trades.parse_trades(_read_json(args.trades, "trade file"))
    rows = trades.price_trades(cs, tenor, book, ratio)
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "price",
        "currency": cs.currency,
        "trades": rows,
        "triangle": trades.triangle_table(cs, book),
    }
    _emit_report(report, args.out, render(report))
    return EXIT_DATA if any(r["status"] != "ok" for r in rows) else EXIT_OK


OVERLAY_HEADER = ["label", "currency", "fxSpot", "fxForwardPoint", "usdOvernight", "accrual"]


def _overlay_rows_from_csv(path: str) -> list[dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read overlay inputs: {exc}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: empty overlay file")
    if [c.strip() for c in rows[0]][:6] != OVERLAY_HEADER:
        raise InputError(f"{path}: expected header {','.join(OVERLAY_HEADER)}")
    out = []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) < 6:
            raise InputError(f"{path}:{lineno}: expected 6 columns")
        try:
            nums = [float(x) for x in r[2:6]]
        except ValueError:
            raise InputError(f"{path}:{lineno}: non-numeric field") from None
        out.append({"label": r[0].strip(), "currency": r[1].strip(), "fxSpot": nums[0],
                    "fxForwardPoint": nums[1], "usdOvernight": nums[2], "accrual": nums[3]})
    return out


def _overlay_rows_from_curves(args: argparse.Namespace) -> list[dict]:
    """Daily FX swaps implied by the curve files over ``--days`` business days."""
    cs, _, _ = load_curve_set(args.curves, args.curves_k, args.extrapolate)
    usd = cs.need_usd().ois_discount
    legs = [(cs.currency, cs.dbar, cs.need_spot())]
    if cs.dbar_k is not None:
        legs.append((cs.currency_k, cs.dbar_k, cs.fx_spot_usd_per_k))
    rows = []
    step = 1.0 / args.days
    for label, curve, spot in legs:
        for n in range(args.days):
            s, p, c, a = pricing.implied_overlay_inputs(curve, usd, spot, n * step, (n + 1) * step)
            rows.append({"label": f"d{n + 1}", "currency": label, "fxSpot": s, "fxForwardPoint": p,
                         "usdOvernight": c, "accrual": a})
    return rows


def cmd_overlay(args: argparse.Namespace) -> int:
    if args.quotes:
        rows = _overlay_rows_from_csv(args.quotes)
    elif args.curves:
        rows = _overlay_rows_from_curves(args)
    else:
        raise InputError("overlay needs --quotes (FX swap CSV) or --curves")
    for r in rows:
        try:
            r["overlayRate"] = pricing.overlay_rate_domestic(r["fxSpot"], r["fxForwardPoint"],
                                                             r["usdOvernight"], r["accrual"])
            r["status"] = "ok"
        except (NonPositiveForward, ValueError) as exc:
            r["overlayRate"] = None
            r["status"] = f"error: {exc}"
    growth = {}
    for ccy in dict.fromkeys(r["currency"] for r in rows):
        good = [r for r in rows if r["currency"] == ccy and r["status"] == "ok"]
        growth[ccy] = pricing.compound_overlay_rates([r["overlayRate"] for r in good],
                                                     [r["accrual"] for r in good])
    report = {"schemaVersion": SCHEMA_VERSION, "command": "overlay", "rows": rows,
              "compoundedGrowth": growth}
    _emit_report(report, args.out, render(report))
    return EXIT_OK


def load_model(path: str, args: argparse.Namespace):
    """(HjmModelSpec, SimGrid, swaptions, workers) from a model JSON file."""
    from .hjm import Factor, HjmModelSpec, SimGrid, SwaptionKind, SwaptionSpec
    from .hjm.swaption import deterministic_underlying

    doc = _read_json(path, "model file")
    try:
        curves = args.curves or (str(Path(path).parent / doc["curves"]) if doc.get("curves") else None)
        if curves:
            cs, tenor, _ = load_curve_set(curves, None, args.extrapolate)
        else:
            from .synthetic import make_world
            world = make_world()
            cs, tenor = world.curves, world.tenor
            log.info("no curve file given; using the default synthetic world")
        factors = tuple(Factor(float(f["a"]), float(f.get("lambda", 0.0))) for f in doc["factors"])
        d = len(factors)
        fx = cs.fx_spot_usd_per_j is not None and cs.usd is not None and doc.get("sigmaFx") is not None
        spec = HjmModelSpec(
            factors=factors,
            initial_curve=cs.dbar,
            usd_curve=cs.usd.ois_discount if cs.usd is not None else None,
            fx_spot_j_per_usd=1.0 / cs.fx_spot_usd_per_j if fx else None,
            sigma_fx=tuple(doc["sigmaFx"]) if fx else None,
            tenor=tenor,
            ois_forwards=cs.ois,
            ois_vols=doc.get("oisSpreadVols", doc.get("oisVols", [0.0] * d)) if cs.ois is not None else None,
            libor_forwards=cs.libor,
            libor_vols=doc.get("liborVols", [0.0] * d) if cs.libor is not None else None,
            fmax=float(doc.get("fmax", 10.0)),
            drift="none" if doc.get("corruptDrift") else "hjm",
        )
        horizon = float(doc.get("horizon", tenor.pillars[-1]))
        paths = int(args.paths if args.paths is not None else doc.get("paths", 10_000))
        seed = int(args.seed if args.seed is not None else doc.get("seed", 0))
        grid = SimGrid(horizon, int(doc.get("steps", round(horizon * 4))), paths, seed)
        swaptions = []
        for sw in doc.get("swaptions", []):
            kind = SwaptionKind(sw["kind"])
            probe = SwaptionSpec(int(sw["start"]), int(sw["end"]), 0.0, kind)
            if "strike" in sw:
                strike = float(sw["strike"])
            else:
                strike = deterministic_underlying(spec, probe)[1] + float(sw.get("strikeOffset", 0.0))
            swaptions.append(SwaptionSpec(probe.start, probe.end, strike, kind))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid model ({exc!r})") from None
    workers = int(args.workers if args.workers is not None else doc.get("workers", 1))
    return spec, grid, tuple(swaptions), workers


def cmd_simulate(args: argparse.Namespace) -> int:
    from .hjm import HjmEngine, diagnose, intrinsic_value, parity_check, price_swaption
    from .hjm.swaption import deterministic_underlying, expiry_time

    if not args.model:
        raise InputError("simulate needs --model")
    spec, grid, swaptions, workers = load_model(args.model, args)
    try:
        engine = HjmEngine(spec, grid)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    ensemble = engine.simulate(record_times=[expiry_time(spec, s) for s in swaptions], workers=workers)
    priced, parity = [], []
    for sw in swaptions:
        try:
            price, se = price_swaption(ensemble, sw)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        a0, fwd = deterministic_underlying(spec, sw)
        head = {"kind": sw.kind.value, "start": sw.start, "end": sw.end, "strike": sw.strike}
        priced.append({**head, "forward": fwd, "annuity": a0, "price": price, "stderr": se,
                       "intrinsic": intrinsic_value(spec, sw)})
        parity.append({**head, **parity_check(ensemble, sw)})
    diag = diagnose(ensemble, swaptions)
    for sw, p in zip(swaptions, parity):
        diag.add(f"parity:{p['kind']}", expiry_time(spec, sw), p["estimate"], p["target"], p["stderr"],
                 p["magnitude"])
    report = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "simulate",
        "seed": grid.seed,
        "paths": grid.paths,
        "steps": grid.steps,
        "horizon": grid.horizon,
        "drift": spec.drift,
        "swaptions": priced,
        "parity": parity,
        "negativeSpreadFraction": ensemble.negative_spread_fraction,
        "diagnostics": diag.to_dict(),
    }
    _emit_report(report, args.out, render(report))
    if diag.overall == "warn":
        log.warning("diagnostics warn: max |z| = %.3f", diag.max_abs_z)
    if diag.overall == "fail":
        log.error("diagnostics failed: max |z| = %.3f", diag.max_abs_z)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    checks = run_selftest(paths=args.paths or 20_000, seed=args.seed or 0)
    report = {"schemaVersion": SCHEMA_VERSION, "command": "selftest", "checks": checks,
              "passed": all(c["passed"] for c in checks)}
    _emit_report(report, args.out, render(report))
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


COMMANDS = {
    "build-curves": cmd_build_curves,
    "price": cmd_price,
    "overlay": cmd_overlay,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="usdsilo", description="USD-collateralized curve building and pricing")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--quotes", help="quote CSV (build-curves) or FX swap CSV (overlay)")
        s.add_argument("--trades", help="trade JSON")
        s.add_argument("--model", help="model JSON")
        s.add_argument("--curves", help="curve-set JSON written by build-curves")
        s.add_argument("--curves-k", help="curve-set JSON of a second non-USD currency")
        s.add_argument("--out", help="output path (curves for build-curves, report otherwise)")
        s.add_argument("--report", help="build-curves report JSON path")
        s.add_argument("--route", choices=["libor", "ois"])
        s.add_argument("--currency", default="J", help="label of the non-USD currency")
        s.add_argument("--seed", type=int)
        s.add_argument("--paths", type=int)
        s.add_argument("--workers", type=int)
        s.add_argument("--days", type=int, default=360, help="overlay periods per year from curves")
        s.add_argument("--extrapolate", action="store_true", help="allow flat-forward extrapolation")
    return p


def _setup_logging() -> None:
    level = os.environ.get("SILO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except StateExplosion as exc:
        print(f"error: numerical failure on path {exc.path} at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalFailure as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DataInconsistency as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
