"""Model specification for the USD-silo HJM simulation.

The effective instantaneous forward fbar(t, s) of currency j is driven by d
factors with volatilities sigma_k(t, s) = a_k exp(-lambda_k (s - t)).
Compounded-OIS and LIBOR period forwards carry constant per-period
volatility vectors. The USD short rate is deterministic and read off the
USD OIS curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..termstructure import DiscountCurve, ForwardCurve, TenorStructure

DRIFT_SCHEMES = ("hjm", "none")


@dataclass(frozen=True)
class Factor:
    a: float
    decay: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.a):
            raise ValueError("factor level must be finite")
        if not (math.isfinite(self.decay) and self.decay >= 0):
            raise ValueError("factor decay must be finite and non-negative")

    def sigma(self, tau: float | np.ndarray) -> float | np.ndarray:
        """Volatility at time-to-maturity ``tau`` = s - t."""
        return self.a * np.exp(-self.decay * np.asarray(tau))

    def integral(self, tau: float | np.ndarray) -> float | np.ndarray:
        """int_0^tau sigma(u) du, with the lambda -> 0 limit a * tau."""
        tau = np.asarray(tau, dtype=float)
        if self.decay == 0.0:
            return self.a * tau
        return self.a * -np.expm1(-self.decay * tau) / self.decay


def _vectors(values, n: int, d: int, name: str) -> np.ndarray:
    """Per-period vol vectors from one shared vector or an explicit list."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = np.tile(arr, (n, 1))
    if arr.shape != (n, d):
        raise ValueError(f"{name} must have shape ({n}, {d}) or ({d},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class HjmModelSpec:
    factors: tuple[Factor, ...]
    initial_curve: DiscountCurve
    usd_curve: DiscountCurve | None = None
    fx_spot_j_per_usd: float | None = None
    sigma_fx: tuple[float, ...] | None = None
    tenor: TenorStructure | None = None
    ois_forwards: ForwardCurve | None = None
    ois_vols: np.ndarray | None = None
    libor_forwards: ForwardCurve | None = None
    libor_vols: np.ndarray | None = None
    fmax: float = 10.0
    drift: str = "hjm"

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("at least one factor is required")
        d = self.d
        if self.drift not in DRIFT_SCHEMES:
            raise ValueError(f"drift must be one of {DRIFT_SCHEMES}")
        if not self.fmax > 0:
            raise ValueError("fmax must be positive")
        if self.sigma_fx is not None:
            sfx = tuple(float(x) for x in self.sigma_fx)
            if len(sfx) != d:
                raise ValueError(f"sigma_fx needs {d} components")
            object.__setattr__(self, "sigma_fx", sfx)
        if self.fx_spot_j_per_usd is not None:
            if self.usd_curve is None:
                raise ValueError("FX simulation needs the USD OIS curve")
            if not self.fx_spot_j_per_usd > 0:
                raise ValueError("FX spot must be positive")
        for fwd, vols, name in ((self.ois_forwards, "ois_vols", "ois_vols"),
                                (self.libor_forwards, "libor_vols", "libor_vols")):
            raw = getattr(self, vols)
            if fwd is None:
                continue
            if self.tenor is None:
                raise ValueError("period forwards need the tenor structure")
            n = self.tenor.size
            arr = _vectors(np.zeros(d) if raw is None else raw, n, d, name)
            arr.flags.writeable = False
            object.__setattr__(self, vols, arr)

    @property
    def d(self) -> int:
        return len(self.factors)

    def sigma(self, t: float, s: float) -> np.ndarray:
        return np.array([f.sigma(s - t) for f in self.factors], dtype=float)

    def integrated_sigma(self, t: float, s: float) -> np.ndarray:
        return np.array([f.integral(s - t) for f in self.factors], dtype=float)

    def zero_volatility(self) -> "HjmModelSpec":
        """Same model with every volatility set to zero."""
        d = self.d
        return HjmModelSpec(
            factors=tuple(Factor(0.0, f.decay) for f in self.factors),
            initial_curve=self.initial_curve,
            usd_curve=self.usd_curve,
            fx_spot_j_per_usd=self.fx_spot_j_per_usd,
            sigma_fx=(0.0,) * d if self.sigma_fx is not None else None,
            tenor=self.tenor,
            ois_forwards=self.ois_forwards,
            ois_vols=None if self.ois_vols is None else np.zeros_like(self.ois_vols),
            libor_forwards=self.libor_forwards,
            libor_vols=None if self.libor_vols is None else np.zeros_like(self.libor_vols),
            fmax=self.fmax,
            drift=self.drift,
        )


def hjm_drift(spec: HjmModelSpec, t: float, s: float) -> float:
    """No-arbitrage drift sigma(t, s) . int_t^s sigma(t, u) du of fbar(t, s)."""
    if s < t:
        raise ValueError("hjm_drift requires t <= s")
    return float(np.dot(spec.sigma(t, s), spec.integrated_sigma(t, s)))


@dataclass(frozen=True)
class SimGrid:
    """Uniform simulation grid; forward cells coincide with the time steps."""

    horizon: float
    steps: int
    paths: int
    seed: int = 0
    chunk_size: int = 4096

    def __post_init__(self) -> None:
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.steps < 1:
            raise ValueError("need at least one time step")
        if self.paths < 2:
            raise ValueError("need at least two paths to estimate a standard error")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    def node(self, t: float, tol: float = 1e-9) -> int:
        """Index of the grid node at time ``t``."""
        x = t / self.dt
        n = int(round(x))
        if abs(x - n) > tol or not 0 <= n <= self.steps:
            raise ValueError(f"time {t} is not a node of the simulation grid")
        return n

    def nodes(self, ts: Sequence[float]) -> np.ndarray:
        return np.array([self.node(t) for t in ts], dtype=int)
