"""Invariant suite run by ``usdsilo selftest`` on synthetic curve worlds."""

from __future__ import annotations

import numpy as np

from . import bootstrap, pricing
from .synthetic import make_world
from .termstructure import ForwardCurve, ForwardKind


def _check(name: str, value: float, tolerance: float) -> dict:
    return {"name": name, "value": float(value), "tolerance": tolerance,
            "passed": bool(np.isfinite(value) and value < tolerance)}


def run_selftest(paths: int = 20_000, seed: int = 0) -> list[dict]:
    from .hjm import Factor, HjmModelSpec, SimGrid, SwaptionKind, SwaptionSpec, diagnose, simulate
    from .hjm.swaption import deterministic_underlying, intrinsic_value, price_swaption

    world = make_world()
    cs, tenor = world.curves, world.tenor
    pillars = tenor.pillars
    truth = cs.dbar.dfs_at(pillars)
    checks = []

    dbar = bootstrap.bootstrap_effective_discount_libor(world.libor_quotes(), cs.usd)
    checks.append(_check("bootstrapLiborRoundTrip", np.max(np.abs(dbar.dfs_at(pillars) - truth)), 1e-10))
    dbar = bootstrap.bootstrap_effective_discount_ois(world.ois_quotes())
    checks.append(_check("bootstrapOisRoundTrip", np.max(np.abs(dbar.dfs_at(pillars) - truth)), 1e-12))

    flat = pricing.CurveSet("J", cs.dbar, libor=cs.libor, ois=cs.ois, usd=bootstrap.UsdDomesticCurves(
        cs.usd.ois_discount,
        ForwardCurve.on_tenor(tenor, np.zeros(tenor.size), ForwardKind.LIBOR_OIS_SPREAD)))
    gap = max(abs(pricing.mtmccs_par_spread(flat, tenor, m)
                  - (pricing.effective_swap_rate(cs.dbar, tenor, 0, m) - pricing.irs_par_rate(cs, tenor, m)))
              for m in range(1, tenor.size + 1))
    checks.append(_check("ccsAsSwapDifference", gap, 1e-14))

    tri = max(abs(pricing.fx_forward_usd(cs, t) * pricing.fx_forward_cross(cs, t)
                  / pricing.fx_forward_usd_per_k(cs, t) - 1.0) for t in pillars)
    checks.append(_check("currencyTriangle", tri, 1e-13))

    days = 360
    rates = [pricing.overlay_rate_domestic(*pricing.implied_overlay_inputs(
        cs.dbar, cs.usd.ois_discount, cs.fx_spot_usd_per_j, n / days, (n + 1) / days)) for n in range(days)]
    growth = pricing.compound_overlay_rates(rates, [1.0 / days] * days)
    checks.append(_check("overlayCompounding", abs(growth * cs.dbar.df(1.0) - 1.0), 1e-6))

    spec = HjmModelSpec(
        factors=(Factor(0.01, 0.1), Factor(0.005, 1.0)),
        initial_curve=cs.dbar,
        usd_curve=cs.usd.ois_discount,
        fx_spot_j_per_usd=1.0 / cs.fx_spot_usd_per_j,
        sigma_fx=(0.08, 0.03),
        tenor=tenor,
        ois_forwards=cs.ois,
        ois_vols=(0.004, 0.002),
    )
    grid = SimGrid(10.0, 40, paths, seed)
    zero = spec.zero_volatility()
    worst = 0.0
    for kind in SwaptionKind:
        _, fwd = deterministic_underlying(spec, SwaptionSpec(8, 28, 0.0, kind))
        for k in (fwd - 0.01, fwd, fwd + 0.01):
            sw = SwaptionSpec(8, 28, k, kind)
            ens = simulate(zero, SimGrid(10.0, 40, 2, seed), record_times=[float(pillars[7])])
            worst = max(worst, abs(price_swaption(ens, sw)[0] - intrinsic_value(zero, sw)))
    checks.append(_check("swaptionZeroVolLimit", worst, 1e-14))

    sw = SwaptionSpec(8, 28, 0.0, SwaptionKind.OIS_PAYER)
    ensemble = simulate(spec, grid, record_times=[float(pillars[7])])
    report = diagnose(ensemble, (sw,))
    checks.append(_check("martingaleMaxAbsZ", report.max_abs_z, 5.0))
    return checks
