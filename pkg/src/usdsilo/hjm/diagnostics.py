"""No-arbitrage diagnostics on a simulated ensemble.

Each check compares a Monte-Carlo mean with the value the initial curves
imply and reports z = (estimate - target) / stderr:

- deflatedBond:   E[1 / betabar(T)]             vs Dbar(0, T) at every node
- deflatedHorizonBond: E[Dbar(T, T_N) / betabar(T)] vs Dbar(0, T_N)
- deflatedFx:     E[fx_{j per USD}(T) / betabar(T)] vs fx(0) D_usd(0, T)
- annuityEffectiveRate / annuityOisRate: E[A S / betabar](T_S) vs A(0) S(0)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import HjmEngine, PathEnsemble, mean_stderr, z_score
from .model import HjmModelSpec, SimGrid
from .swaption import SwaptionSpec, deterministic_underlying, expiry_time, underlying_paths, model_curve_set
from .. import pricing

PASS_Z = 3.0
FAIL_Z = 5.0


def status(z: float) -> str:
    az = abs(z)
    if az < PASS_Z:
        return "pass"
    return "warn" if az < FAIL_Z else "fail"


@dataclass
class DiagnosticsReport:
    checks: list[dict] = field(default_factory=list)

    def add(self, name: str, time: float, estimate: float, target: float, stderr: float,
            magnitude: float = 0.0) -> None:
        z = z_score(estimate, target, stderr, magnitude)
        self.checks.append({"name": name, "time": time, "estimate": estimate, "target": target,
                            "stderr": stderr, "z": z, "status": status(z)})

    def of(self, name: str) -> list[dict]:
        return [c for c in self.checks if c["name"] == name]

    @property
    def max_abs_z(self) -> float:
        return max((abs(c["z"]) for c in self.checks), default=0.0)

    @property
    def overall(self) -> str:
        states = {c["status"] for c in self.checks}
        for s in ("fail", "warn"):
            if s in states:
                return s
        return "pass"

    def to_dict(self) -> dict:
        return {"maxAbsZ": self.max_abs_z, "status": self.overall, "checks": self.checks}


def diagnose(ensemble: PathEnsemble, swaptions: tuple[SwaptionSpec, ...] = ()) -> DiagnosticsReport:
    spec, grid = ensemble.spec, ensemble.grid
    times = grid.times
    dfs = spec.initial_curve.dfs_at(times)
    rep = DiagnosticsReport()
    for k in range(1, grid.steps + 1):
        rep.add("deflatedBond", times[k], *_ms(ensemble.deflator[:, k], dfs[k]))
    for k in range(1, grid.steps):
        rep.add("deflatedHorizonBond", times[k], *_ms(ensemble.horizon_bond[:, k], dfs[-1]))
    if ensemble.fx is not None:
        usd = spec.usd_curve.dfs_at(times)
        x0 = spec.fx_spot_j_per_usd
        for k in range(1, grid.steps + 1):
            vals = ensemble.fx[:, k] * ensemble.deflator[:, k]
            rep.add("deflatedFx", times[k], *_ms(vals, x0 * usd[k]))
    if swaptions:
        engine = HjmEngine(spec, grid)
        cs = model_curve_set(spec)
        seen = set()
        for sw in swaptions:
            if (sw.start, sw.end) in seen:
                continue
            seen.add((sw.start, sw.end))
            node = int(engine.period_starts[sw.start])
            paths = underlying_paths(engine, ensemble.state(node), sw)
            a0, _ = deterministic_underlying(spec, sw)
            sbar0 = pricing.effective_swap_rate(cs.dbar, spec.tenor, sw.start, sw.end)
            sois0 = pricing.forward_ois_rate(cs, spec.tenor, sw.start, sw.end)
            t = expiry_time(spec, sw)
            weight = paths.deflator * paths.annuity
            rep.add("annuityEffectiveRate", t, *_ms(weight * paths.effective_rate, a0 * sbar0))
            rep.add("annuityOisRate", t, *_ms(weight * paths.ois_rate, a0 * sois0))
    return rep


def _ms(values: np.ndarray, target: float) -> tuple[float, float, float]:
    est, se = mean_stderr(values)
    return est, float(target), se


def martingale_diagnostics(spec: HjmModelSpec, grid: SimGrid,
                           swaptions: tuple[SwaptionSpec, ...] = (), workers: int = 1) -> DiagnosticsReport:
    record = [expiry_time(spec, s) for s in swaptions]
    ensemble = HjmEngine(spec, grid).simulate(record_times=record, workers=workers)
    return diagnose(ensemble, swaptions)
