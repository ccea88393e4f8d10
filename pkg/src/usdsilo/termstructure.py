"""Time grids, day counts and curve objects.

Conventions used throughout the package:

- Times are year fractions measured from the curve anchor (t = 0 is today).
- A ``TenorStructure`` holds the payment grid T_0 < T_1 < ... < T_M and the
  per-period accruals of the fixed leg, the currency-j floating leg and,
  optionally, the USD floating leg. Period m (1-based) is [T_{m-1}, T_m].
- Discount curves interpolate log-linearly in the discount factor between
  pillars. Curves are immutable snapshots.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from datetime import date
from typing import Sequence

import numpy as np

from .errors import ExtrapolationRequested

log = logging.getLogger(__name__)

# days per year used to turn raw year fractions back into day counts
_DAYS_PER_YEAR = 365.0


class DayCount(enum.Enum):
    ACT_360 = 360
    ACT_365F = 365

    @property
    def denominator(self) -> float:
        return float(self.value)

    def year_fraction(self, start: date, end: date) -> float:
        """Accrual between two calendar dates."""
        return (end - start).days / self.denominator

    def accrual(self, t1: float, t2: float) -> float:
        """Accrual for a period given as raw (ACT/365F) year-fraction times.

        ACT/365F is a passthrough; ACT/360 rescales the implied day count.
        """
        if self is DayCount.ACT_365F:
            return t2 - t1
        return (t2 - t1) * _DAYS_PER_YEAR / self.denominator

    @classmethod
    def parse(cls, text: str | int | float) -> "DayCount":
        key = str(text).strip().upper().replace("/", "").replace("_", "")
        table = {
            "360": cls.ACT_360, "360.0": cls.ACT_360, "ACT360": cls.ACT_360,
            "365": cls.ACT_365F, "365.0": cls.ACT_365F, "ACT365": cls.ACT_365F,
            "ACT365F": cls.ACT_365F, "ACT365FIXED": cls.ACT_365F,
        }
        try:
            return table[key]
        except KeyError:
            raise ValueError(f"unknown day count {text!r}") from None


@dataclass(frozen=True)
class TenorStructure:
    start: float
    pillars: tuple[float, ...]
    fixed_accruals: tuple[float, ...]
    float_accruals: tuple[float, ...]
    float_accruals_usd: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("pillars", "fixed_accruals", "float_accruals", "float_accruals_usd"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(x) for x in value))
        m = len(self.pillars)
        if m == 0:
            raise ValueError("tenor structure needs at least one pillar")
        if not self.start < self.pillars[0]:
            raise ValueError("start must precede the first pillar")
        if any(b <= a for a, b in zip(self.pillars, self.pillars[1:])):
            raise ValueError("pillars must be strictly increasing")
        lists = [self.fixed_accruals, self.float_accruals]
        if self.float_accruals_usd is not None:
            lists.append(self.float_accruals_usd)
        for acc in lists:
            if len(acc) != m:
                raise ValueError(f"accrual list has length {len(acc)}, expected {m}")
            if any(not a > 0 for a in acc):
                raise ValueError("accrual fractions must be positive")
        for fx, fl in zip(self.fixed_accruals, self.float_accruals):
            if not 0.9 <= fx / fl <= 1.1:
                raise ValueError(f"fixed/float accrual ratio {fx / fl:.6f} outside [0.9, 1.1]")

    @classmethod
    def regular(
        cls,
        n_periods: int,
        frequency: int = 4,
        start: float = 0.0,
        fixed_daycount: DayCount = DayCount.ACT_365F,
        float_daycount: DayCount = DayCount.ACT_365F,
        usd_daycount: DayCount | None = None,
    ) -> "TenorStructure":
        """Evenly spaced grid with ``frequency`` periods per year."""
        times = [start + k / frequency for k in range(n_periods + 1)]
        periods = list(zip(times[:-1], times[1:]))
        usd = None
        if usd_daycount is not None:
            usd = tuple(usd_daycount.accrual(a, b) for a, b in periods)
        return cls(
            start=times[0],
            pillars=tuple(times[1:]),
            fixed_accruals=tuple(fixed_daycount.accrual(a, b) for a, b in periods),
            float_accruals=tuple(float_daycount.accrual(a, b) for a, b in periods),
            float_accruals_usd=usd,
        )

    @property
    def size(self) -> int:
        return len(self.pillars)

    @property
    def times(self) -> np.ndarray:
        """T_0, T_1, ..., T_M."""
        return np.array((self.start,) + self.pillars)

    @property
    def usd_accruals(self) -> tuple[float, ...]:
        return self.float_accruals_usd if self.float_accruals_usd is not None else self.float_accruals

    def day_count_ratio(self) -> float:
        """Constant Delta/delta shared by every period.

        Raises if the ratio varies across periods; callers then have to supply it.
        """
        ratios = np.array(self.fixed_accruals) / np.array(self.float_accruals)
        if np.ptp(ratios) > 1e-12 * abs(ratios[0]):
            raise ValueError("fixed/float accrual ratio is not constant; pass it explicitly")
        return float(ratios[0])

    def truncated(self, m: int) -> "TenorStructure":
        """The first ``m`` periods."""
        if not 1 <= m <= self.size:
            raise ValueError(f"cannot truncate {self.size} periods to {m}")
        usd = self.float_accruals_usd[:m] if self.float_accruals_usd is not None else None
        return TenorStructure(self.start, self.pillars[:m], self.fixed_accruals[:m],
                              self.float_accruals[:m], usd)


@dataclass(frozen=True)
class DiscountCurve:
    """Discount factors at pillar times with log-linear interpolation.

    The anchor node (anchor, 1.0) is inserted if the caller leaves it out.
    Discount factors must be positive but need not be monotone.
    """

    times: tuple[float, ...]
    dfs: tuple[float, ...]
    anchor: float = 0.0
    interp: str = "log_linear"
    extrapolate: bool = False
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _logdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        times = [float(t) for t in self.times]
        dfs = [float(d) for d in self.dfs]
        if len(times) != len(dfs):
            raise ValueError("times and dfs must have equal length")
        if self.interp != "log_linear":
            raise ValueError(f"unsupported interpolation {self.interp!r}")
        if not times or times[0] != self.anchor:
            times.insert(0, float(self.anchor))
            dfs.insert(0, 1.0)
        if dfs[0] != 1.0:
            raise ValueError("discount factor at the anchor must equal 1")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("pillar times must be strictly increasing")
        if any(not d > 0 for d in dfs):
            raise ValueError("discount factors must be strictly positive")
        object.__setattr__(self, "times", tuple(times))
        object.__setattr__(self, "dfs", tuple(dfs))
        t = np.array(times)
        logdf = np.log(np.array(dfs))
        t.flags.writeable = False
        logdf.flags.writeable = False
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_logdf", logdf)

    @property
    def last_time(self) -> float:
        return self.times[-1]

    def with_extrapolation(self, enabled: bool = True) -> "DiscountCurve":
        return DiscountCurve(self.times, self.dfs, self.anchor, self.interp, enabled)

    def df(self, t: float) -> float:
        t = float(t)
        if t < self.anchor:
            raise ValueError(f"time {t} precedes curve anchor {self.anchor}")
        i = int(np.searchsorted(self._t, t))
        if i < len(self.times) and self.times[i] == t:
            return self.dfs[i]
        if i == len(self.times):
            if not self.extrapolate:
                raise ExtrapolationRequested(t, self.last_time)
            t0, t1 = self._t[-2], self._t[-1]
            slope = (self._logdf[-1] - self._logdf[-2]) / (t1 - t0)
            return math.exp(self._logdf[-1] + slope * (t - t1))
        t0, t1 = self._t[i - 1], self._t[i]
        w = (t - t0) / (t1 - t0)
        return math.exp((1.0 - w) * self._logdf[i - 1] + w * self._logdf[i])

    def dfs_at(self, ts: Sequence[float] | np.ndarray) -> np.ndarray:
        return np.array([self.df(t) for t in np.asarray(ts, dtype=float)])

    def zero_rate(self, t: float) -> float:
        """Continuously compounded zero rate; 0 at the anchor."""
        if t == self.anchor:
            return 0.0
        return -math.log(self.df(t)) / (t - self.anchor)


def df(curve: DiscountCurve, t: float) -> float:
    return curve.df(t)


def forward_df(curve: DiscountCurve, t1: float, t2: float) -> float:
    """df(t2) / df(t1), the forward zero-coupon bond between two dates."""
    if t2 < t1:
        raise ValueError("forward_df requires t1 <= t2")
    if t1 == t2:
        return 1.0
    return curve.df(t2) / curve.df(t1)


class ForwardKind(enum.Enum):
    LIBOR_FORWARD = "LiborForward"
    LIBOR_OIS_SPREAD = "LiborOisSpread"
    COMPOUNDED_OIS_FORWARD = "CompoundedOisForward"


@dataclass(frozen=True)
class ForwardCurve:
    """Expected simple rates per accrual period, keyed by (start, end)."""

    periods: tuple[tuple[float, float], ...]
    values: tuple[float, ...]
    kind: ForwardKind

    def __post_init__(self) -> None:
        periods = tuple((float(a), float(b)) for a, b in self.periods)
        values = tuple(float(v) for v in self.values)
        if len(periods) != len(values):
            raise ValueError("periods and values must have equal length")
        for a, b in periods:
            if not b > a:
                raise ValueError(f"empty or reversed period ({a}, {b})")
        for (_, b), (c, _) in zip(periods, periods[1:]):
            if b != c:
                raise ValueError("periods must be contiguous and ascending")
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "values", values)
        if self.kind is ForwardKind.LIBOR_OIS_SPREAD:
            warn_negative_spreads(self)

    @classmethod
    def on_tenor(cls, tenor: TenorStructure, values: Sequence[float], kind: ForwardKind) -> "ForwardCurve":
        t = tenor.times
        return cls(tuple(zip(t[:-1], t[1:])), tuple(values), kind)

    def __len__(self) -> int:
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.array(self.values)

    def value(self, start: float, end: float, tol: float = 1e-12) -> float:
        for (a, b), v in zip(self.periods, self.values):
            if abs(a - start) <= tol and abs(b - end) <= tol:
                return v
        raise KeyError(f"no {self.kind.value} period ({start}, {end})")

    def on(self, tenor: TenorStructure, first: int = 1, last: int | None = None) -> np.ndarray:
        """Values for periods ``first..last`` (1-based, inclusive) of ``tenor``."""
        last = tenor.size if last is None else last
        t = tenor.times
        return np.array([self.value(t[m - 1], t[m]) for m in range(first, last + 1)])


def warn_negative_spreads(curve: ForwardCurve) -> int:
    """Log a warning for negative LIBOR-OIS spreads; returns how many there are."""
    n = sum(1 for v in curve.values if v < 0)
    if n:
        log.warning("%d of %d LIBOR-OIS spreads are negative", n, len(curve.values))
    return n


def compounded_ois_period_rate(integral: float, accrual: float) -> float:
    """Simple rate equivalent to compounding the overnight rate over a period.

    ``integral`` is the integral of the short rate over the period.
    """
    if not accrual > 0:
        raise ValueError("accrual must be positive")
    return math.expm1(integral) / accrual
