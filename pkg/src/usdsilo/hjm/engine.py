"""Monte-Carlo engine: Euler evolution of the discretized USD-silo state.

Discretization. The simulation grid t_n = n h doubles as the forward grid:
fbar is piecewise constant on cells [t_l, t_{l+1}), so that

    Dbar(t_n, t_e) = exp(-h * sum_{l=n}^{e-1} fbar(t_n, t_l))

and the numeraire accrues the left-point short rate, log betabar += h fbar(t_n, t_n).
The factor volatility of cell l at time t_n is the cell average of
sigma(t_n, .) and depends only on the offset l - n. The drift of cell l is
sigma_l . (int_{t_{n+1}}^{t_l} sigma + sigma_l h / 2), the Riemann-sum form of
sigma . int sigma under which deflated bonds are exact discrete martingales.
Period forwards get drift sigma_m . int_{t_{n+1}}^{T_m} sigma on the same sums,
and the FX rate is advanced log-exactly given the left-point short rates.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import StateExplosion
from . import rng
from .model import HjmModelSpec, SimGrid

log = logging.getLogger(__name__)


@dataclass
class PathState:
    """State of a block of paths at grid node ``step``.

    Arrays are indexed by path first. ``fbar[:, l]`` is the forward of cell l;
    cells before ``step`` are in the past and no longer evolve.
    """

    step: int
    fbar: np.ndarray
    log_beta: np.ndarray
    fx: np.ndarray | None = None
    ois: np.ndarray | None = None
    libor: np.ndarray | None = None

    @property
    def beta(self) -> np.ndarray:
        return np.exp(self.log_beta)


@dataclass
class PathEnsemble:
    spec: HjmModelSpec
    grid: SimGrid
    deflator: np.ndarray
    horizon_bond: np.ndarray
    fx: np.ndarray | None
    snapshots: dict[int, PathState] = field(default_factory=dict)
    negative_spread_fraction: float = 0.0

    @property
    def paths(self) -> int:
        return self.deflator.shape[0]

    def state(self, node: int) -> PathState:
        try:
            return self.snapshots[node]
        except KeyError:
            raise KeyError(f"node {node} was not recorded; pass it in record_times") from None

    def discount(self, node: int, end: int) -> np.ndarray:
        """Per-path Dbar(t_node, t_end)."""
        st = self.state(node)
        return np.exp(-self.grid.dt * st.fbar[:, node:end].sum(axis=1))

    def stat(self, values: np.ndarray) -> tuple[float, float]:
        return mean_stderr(values)


def mean_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(n))


# relative size below which a zero-variance difference counts as rounding
_ROUNDING = 1e-12


def z_score(estimate: float, target: float, stderr: float, magnitude: float = 0.0) -> float:
    """(estimate - target) / stderr, with zero-variance cases decided by rounding size.

    ``magnitude`` is the size of the terms that cancel in the estimate, for
    targets that are near zero by cancellation.
    """
    diff = estimate - target
    scale = _ROUNDING * max(abs(target), abs(estimate), magnitude, 1e-300)
    # a deterministic quantity has only rounding noise in its sample stderr
    if stderr > scale:
        return diff / stderr
    if abs(diff) <= scale:
        return 0.0
    return float("inf") if diff > 0 else float("-inf")


class HjmEngine:
    """Precomputed deterministic tables for one (spec, grid) pair."""

    def __init__(self, spec: HjmModelSpec, grid: SimGrid):
        self.spec = spec
        self.grid = grid
        n, h, d = grid.steps, grid.dt, spec.d
        t = grid.times

        logd = np.log(spec.initial_curve.dfs_at(t))
        self.f0 = (logd[:-1] - logd[1:]) / h

        offsets = np.arange(n + 1) * h
        sig = np.empty((n, d))
        for k, fac in enumerate(spec.factors):
            cum = fac.integral(offsets)
            sig[:, k] = (cum[1:] - cum[:-1]) / h
        # cum_sig[o] = sum_{o'=1}^{o} sig[o'] h, the discretized int_{t+h}^{t+(o+1)h} sigma
        cum_sig = np.zeros((n, d))
        cum_sig[1:] = np.cumsum(sig[1:] * h, axis=0)
        mu = np.zeros(n)
        if spec.drift == "hjm":
            mu[1:] = np.einsum("ok,ok->o", sig[1:], cum_sig[:-1] + 0.5 * sig[1:] * h)
        self.sig = sig
        self.cum_sig = cum_sig
        self.mu = mu

        if spec.usd_curve is not None:
            logu = np.log(spec.usd_curve.dfs_at(t))
            self.usd_rate_dt = logu[:-1] - logu[1:]
        else:
            self.usd_rate_dt = None
        self.sigma_fx = np.array(spec.sigma_fx if spec.sigma_fx is not None else np.zeros(d))

        self.period_ends = np.zeros(0, dtype=int)
        self.accruals = np.zeros(0)
        self.ois0 = self.libor0 = None
        self.ois_vols = self.libor_vols = None
        if spec.tenor is not None and (spec.ois_forwards is not None or spec.libor_forwards is not None):
            tenor = spec.tenor
            times = tenor.times
            keep = int(np.sum(times[1:] <= grid.horizon + 1e-9))
            if keep == 0:
                raise ValueError("no forward period ends within the simulation horizon")
            self.period_ends = grid.nodes(times[1 : keep + 1])
            self.period_starts = grid.nodes(times[:keep])
            self.accruals = np.array(tenor.float_accruals[:keep])
            if spec.ois_forwards is not None:
                self.ois0 = spec.ois_forwards.on(tenor)[:keep]
                self.ois_vols = np.array(spec.ois_vols[:keep])
            if spec.libor_forwards is not None:
                self.libor0 = spec.libor_forwards.on(tenor)[:keep]
                self.libor_vols = np.array(spec.libor_vols[:keep])

    @property
    def n_periods(self) -> int:
        return len(self.period_ends)

    def bond_vol(self, node: int, end: int) -> np.ndarray:
        """Discretized int_{t_{node+1}}^{t_end} sigma(t_node, u) du."""
        o = end - 1 - node
        return self.cum_sig[o] if o >= 1 else np.zeros(self.spec.d)

    def _forward_drift(self, node: int, vols: np.ndarray) -> np.ndarray:
        if self.spec.drift != "hjm":
            return np.zeros(len(vols))
        gam = np.array([self.bond_vol(node, e) for e in self.period_ends])
        return np.einsum("mk,mk->m", vols, gam)

    def initial_state(self, n_paths: int) -> PathState:
        fx = None
        if self.spec.fx_spot_j_per_usd is not None:
            fx = np.full(n_paths, float(self.spec.fx_spot_j_per_usd))
        return PathState(
            step=0,
            fbar=np.tile(self.f0, (n_paths, 1)),
            log_beta=np.zeros(n_paths),
            fx=fx,
            ois=None if self.ois0 is None else np.tile(self.ois0, (n_paths, 1)),
            libor=None if self.libor0 is None else np.tile(self.libor0, (n_paths, 1)),
        )

    def evolve_step(self, state: PathState, z: np.ndarray, first_path: int = 0) -> PathState:
        """Advance ``state`` one step using standard normals ``z`` of shape (paths, d)."""
        n = state.step
        if n >= self.grid.steps:
            raise ValueError("state is already at the horizon")
        h = self.grid.dt
        dw = z * np.sqrt(h)
        short = state.fbar[:, n]

        fbar = state.fbar.copy()
        live = slice(n + 1, self.grid.steps)
        o = np.arange(1, self.grid.steps - n)
        fbar[:, live] += self.mu[o] * h + dw @ self.sig[o].T

        fx = None
        if state.fx is not None:
            drift = short * h - self.usd_rate_dt[n] - 0.5 * float(self.sigma_fx @ self.sigma_fx) * h
            fx = state.fx * np.exp(drift + dw @ self.sigma_fx)

        alive = self.period_ends > n
        ois = libor = None
        if state.ois is not None:
            ois = state.ois.copy()
            inc = self._forward_drift(n, self.ois_vols) * h + dw @ self.ois_vols.T
            ois[:, alive] += inc[:, alive]
        if state.libor is not None:
            libor = state.libor.copy()
            inc = self._forward_drift(n, self.libor_vols) * h + dw @ self.libor_vols.T
            libor[:, alive] += inc[:, alive]

        if fbar.shape[1] > n + 1:
            tail = np.abs(fbar[:, live])
            worst = tail.max(axis=1)
            bad = np.nonzero(worst > self.spec.fmax)[0]
            if bad.size:
                p = int(bad[0])
                raise StateExplosion(first_path + p, n + 1, float(worst[p]), self.spec.fmax)

        return PathState(n + 1, fbar, state.log_beta + short * h, fx, ois, libor)

    def _run_chunk(self, first: int, count: int, record: frozenset[int]) -> dict:
        steps, d = self.grid.steps, self.spec.d
        z = rng.gaussians(self.grid.seed, first, count, steps, d)
        state = self.initial_state(count)
        h = self.grid.dt
        deflator = np.empty((count, steps + 1))
        horizon_bond = np.empty((count, steps + 1))
        fx = np.empty((count, steps + 1)) if state.fx is not None else None
        snaps: dict[int, PathState] = {}
        negative = 0
        checked = 0

        def capture(s: PathState) -> None:
            nonlocal negative, checked
            k = s.step
            deflator[:, k] = np.exp(-s.log_beta)
            horizon_bond[:, k] = np.exp(-s.log_beta - h * s.fbar[:, k:].sum(axis=1))
            if fx is not None:
                fx[:, k] = s.fx
            if k in record:
                snaps[k] = s
            if s.ois is not None and s.libor is not None:
                alive = self.period_ends > k
                spread = s.libor[:, alive] - s.ois[:, alive]
                negative += int(np.count_nonzero(spread < 0))
                checked += spread.size

        capture(state)
        for n in range(steps):
            state = self.evolve_step(state, z[:, n, :], first)
            capture(state)
        return {"deflator": deflator, "horizon_bond": horizon_bond, "fx": fx,
                "snapshots": snaps, "negative": negative, "checked": checked}

    def simulate(self, record_times=(), workers: int = 1) -> PathEnsemble:
        record = frozenset(int(self.grid.node(t)) for t in record_times)
        size = self.grid.chunk_size
        starts = list(range(0, self.grid.paths, size))
        jobs = [(s, min(size, self.grid.paths - s)) for s in starts]
        if workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda j: self._run_chunk(j[0], j[1], record), jobs))
        else:
            parts = [self._run_chunk(s, c, record) for s, c in jobs]

        def cat(key):
            return np.concatenate([p[key] for p in parts], axis=0)

        snapshots = {}
        for k in sorted(record):
            pieces = [p["snapshots"][k] for p in parts]
            snapshots[k] = PathState(
                step=k,
                fbar=np.concatenate([s.fbar for s in pieces]),
                log_beta=np.concatenate([s.log_beta for s in pieces]),
                fx=None if pieces[0].fx is None else np.concatenate([s.fx for s in pieces]),
                ois=None if pieces[0].ois is None else np.concatenate([s.ois for s in pieces]),
                libor=None if pieces[0].libor is None else np.concatenate([s.libor for s in pieces]),
            )
        checked = sum(p["checked"] for p in parts)
        frac = sum(p["negative"] for p in parts) / checked if checked else 0.0
        if frac > 0:
            log.warning("LIBOR-OIS spread negative in %.2f%% of simulated period states", 100 * frac)
        return PathEnsemble(
            spec=self.spec,
            grid=self.grid,
            deflator=cat("deflator"),
            horizon_bond=cat("horizon_bond"),
            fx=None if parts[0]["fx"] is None else cat("fx"),
            snapshots=snapshots,
            negative_spread_fraction=frac,
        )


def evolve_step(engine: HjmEngine, state: PathState, z: np.ndarray) -> PathState:
    return engine.evolve_step(state, z)


def simulate(spec: HjmModelSpec, grid: SimGrid, record_times=(), workers: int = 1) -> PathEnsemble:
    return HjmEngine(spec, grid).simulate(record_times, workers)
