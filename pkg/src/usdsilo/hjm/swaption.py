"""OIS swaptions and MtMCCOIS basis-spread swaptions by simulation.

Both are priced under the currency-j measure with the adjusted collateral
account as numeraire:

    price = E[ A(T_S) (X(T_S) - K)^+ / betabar(T_S) ]

where A is the annuity of the underlying and X is either the forward OIS
rate or the forward basis spread (effective swap rate minus OIS rate).
The two-rate dynamics of the spread are not integrated directly; they
follow from the simulated curve and OIS forwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .. import pricing
from ..bootstrap import UsdDomesticCurves
from ..termstructure import ForwardCurve, ForwardKind
from .engine import HjmEngine, PathEnsemble, PathState, mean_stderr, z_score
from .model import HjmModelSpec, SimGrid


class SwaptionKind(enum.Enum):
    OIS_PAYER = "OisPayer"
    OIS_RECEIVER = "OisReceiver"
    BASIS_PAYER = "BasisSpreadPayer"
    BASIS_RECEIVER = "BasisSpreadReceiver"

    @property
    def is_payer(self) -> bool:
        return self in (SwaptionKind.OIS_PAYER, SwaptionKind.BASIS_PAYER)

    @property
    def is_basis(self) -> bool:
        return self in (SwaptionKind.BASIS_PAYER, SwaptionKind.BASIS_RECEIVER)

    def flipped(self) -> "SwaptionKind":
        return {
            SwaptionKind.OIS_PAYER: SwaptionKind.OIS_RECEIVER,
            SwaptionKind.OIS_RECEIVER: SwaptionKind.OIS_PAYER,
            SwaptionKind.BASIS_PAYER: SwaptionKind.BASIS_RECEIVER,
            SwaptionKind.BASIS_RECEIVER: SwaptionKind.BASIS_PAYER,
        }[self]


@dataclass(frozen=True)
class SwaptionSpec:
    """Option expiring at T_start on the swap over periods start+1..end of the model tenor."""

    start: int
    end: int
    strike: float
    kind: SwaptionKind

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError("swaption needs 0 <= start < end")


@dataclass(frozen=True)
class UnderlyingPaths:
    deflator: np.ndarray
    annuity: np.ndarray
    effective_rate: np.ndarray
    ois_rate: np.ndarray

    @property
    def basis_spread(self) -> np.ndarray:
        return self.effective_rate - self.ois_rate


def expiry_time(spec: HjmModelSpec, swaption: SwaptionSpec) -> float:
    return float(spec.tenor.times[swaption.start])


def _check(engine: HjmEngine, swaption: SwaptionSpec) -> None:
    if engine.ois0 is None:
        raise ValueError("swaption pricing needs simulated OIS forwards")
    if swaption.end > engine.n_periods:
        raise ValueError(f"swaption end period {swaption.end} beyond the simulated horizon")


def underlying_paths(engine: HjmEngine, state: PathState, swaption: SwaptionSpec) -> UnderlyingPaths:
    """Annuity, effective swap rate and OIS swap rate at the state's node."""
    _check(engine, swaption)
    s, m = swaption.start, swaption.end
    node = state.step
    if node != engine.period_starts[s]:
        raise ValueError("state is not at the swaption expiry")
    h = engine.grid.dt
    cum = np.cumsum(state.fbar[:, node:], axis=1) * h
    ends = engine.period_ends[s:m] - node
    bonds = np.exp(-cum[:, ends - 1])  # Dbar(T_S, T_m) for m = s+1..end
    w = bonds * engine.accruals[s:m]
    annuity = w.sum(axis=1)
    effective = (1.0 - bonds[:, -1]) / annuity
    ois = (w * state.ois[:, s:m]).sum(axis=1) / annuity
    return UnderlyingPaths(np.exp(-state.log_beta), annuity, effective, ois)


def swaption_payoffs(paths: UnderlyingPaths, swaption: SwaptionSpec) -> np.ndarray:
    """Deflated per-path payoffs."""
    x = paths.basis_spread if swaption.kind.is_basis else paths.ois_rate
    sign = 1.0 if swaption.kind.is_payer else -1.0
    return paths.deflator * paths.annuity * np.maximum(sign * (x - swaption.strike), 0.0)


def _from_ensemble(ensemble: PathEnsemble, swaption: SwaptionSpec) -> UnderlyingPaths:
    engine = HjmEngine(ensemble.spec, ensemble.grid)
    node = int(engine.period_starts[swaption.start])
    return underlying_paths(engine, ensemble.state(node), swaption)


def price_swaption(ensemble: PathEnsemble, swaption: SwaptionSpec) -> tuple[float, float]:
    return mean_stderr(swaption_payoffs(_from_ensemble(ensemble, swaption), swaption))


def _simulate(spec: HjmModelSpec, grid: SimGrid, swaption: SwaptionSpec, workers: int) -> PathEnsemble:
    engine = HjmEngine(spec, grid)
    _check(engine, swaption)
    return engine.simulate(record_times=[expiry_time(spec, swaption)], workers=workers)


def price_ois_swaption(spec: HjmModelSpec, grid: SimGrid, swaption: SwaptionSpec,
                       workers: int = 1) -> tuple[float, float]:
    if swaption.kind.is_basis:
        raise ValueError("use price_basis_swaption for basis-spread swaptions")
    return price_swaption(_simulate(spec, grid, swaption, workers), swaption)


def price_basis_swaption(spec: HjmModelSpec, grid: SimGrid, swaption: SwaptionSpec,
                         workers: int = 1) -> tuple[float, float]:
    if not swaption.kind.is_basis:
        raise ValueError("use price_ois_swaption for OIS swaptions")
    return price_swaption(_simulate(spec, grid, swaption, workers), swaption)


def parity_check(ensemble: PathEnsemble, swaption: SwaptionSpec) -> dict:
    """Payer minus receiver against A(0) (forward - K), with the pathwise standard error."""
    paths = _from_ensemble(ensemble, swaption)
    payer = swaption if swaption.kind.is_payer else SwaptionSpec(
        swaption.start, swaption.end, swaption.strike, swaption.kind.flipped())
    receiver = SwaptionSpec(payer.start, payer.end, payer.strike, payer.kind.flipped())
    diff = swaption_payoffs(paths, payer) - swaption_payoffs(paths, receiver)
    est, se = mean_stderr(diff)
    a0, fwd = deterministic_underlying(ensemble.spec, swaption)
    target = a0 * (fwd - swaption.strike)
    magnitude = a0 * (abs(fwd) + abs(swaption.strike))
    return {"estimate": est, "target": target, "stderr": se,
            "z": z_score(est, target, se, magnitude), "magnitude": magnitude}


def model_curve_set(spec: HjmModelSpec) -> pricing.CurveSet:
    """Pricing-module view of the model's initial curves."""
    usd = None
    if spec.usd_curve is not None:
        zero = ForwardCurve(((0.0, 1.0),), (0.0,), ForwardKind.LIBOR_OIS_SPREAD)
        usd = UsdDomesticCurves(spec.usd_curve, zero)
    return pricing.CurveSet("J", spec.initial_curve, libor=spec.libor_forwards,
                            ois=spec.ois_forwards, usd=usd)


def deterministic_underlying(spec: HjmModelSpec, swaption: SwaptionSpec) -> tuple[float, float]:
    """(A(0), forward) from the pricing module's curve formulas."""
    cs = model_curve_set(spec)
    a0 = pricing.annuity(cs.dbar, spec.tenor, swaption.start, swaption.end)
    if swaption.kind.is_basis:
        fwd = pricing.mtmccois_par_spread(cs, spec.tenor, swaption.start, swaption.end)
    else:
        fwd = pricing.forward_ois_rate(cs, spec.tenor, swaption.start, swaption.end)
    return a0, fwd


def intrinsic_value(spec: HjmModelSpec, swaption: SwaptionSpec) -> float:
    """A(0) max(+-(forward - K), 0): the zero-volatility price."""
    a0, fwd = deterministic_underlying(spec, swaption)
    sign = 1.0 if swaption.kind.is_payer else -1.0
    return a0 * max(sign * (fwd - swaption.strike), 0.0)


def swap_rate_volatilities(engine: HjmEngine, state: PathState, start: int, end: int
                           ) -> tuple[np.ndarray, np.ndarray]:
    """Instantaneous volatility vectors of the effective swap rate and the OIS swap rate.

    sigma_1 = [Dbar(t,T_M) I_M + S_1 sum delta_m Dbar(t,T_m) I_m] / A
    sigma_2 = sum delta_m Dbar(t,T_m) [sigma_m + (S_2 - L_m) I_m] / A
    with I_m = int_{T_S}^{T_m} sigma(t, u) du on the engine's discretization.
    Returned arrays have shape (paths, d).
    """
    node = state.step
    h = engine.grid.dt
    ends = engine.period_ends[start:end]
    s_end = engine.period_starts[start]
    cum = np.cumsum(state.fbar[:, node:], axis=1) * h
    bonds = np.exp(-cum[:, ends - node - 1])  # Dbar(t, T_m)
    d_s = np.exp(-cum[:, s_end - node - 1]) if s_end > node else np.ones(len(bonds))
    w = bonds * engine.accruals[start:end]
    a = w.sum(axis=1)
    s1 = (d_s - bonds[:, -1]) / a
    s2 = (w * state.ois[:, start:end]).sum(axis=1) / a
    base = engine.bond_vol(node, s_end)
    integ = np.array([engine.bond_vol(node, e) - base for e in ends])  # (periods, d)
    sigma1 = (bonds[:, -1:] * integ[-1] + s1[:, None] * (w @ integ)) / a[:, None]
    gap = s2[:, None] - state.ois[:, start:end]
    sigma2 = (w @ engine.ois_vols[start:end] + (w * gap) @ integ) / a[:, None]
    return sigma1, sigma2
