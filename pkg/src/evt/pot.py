"""
Peaks-over-threshold preprocessing

- prices -> non-overlapping horizon returns (log or simple)
- returns -> threshold exceedances, excesses and the empirical tail fraction
- empirical mean-excess diagnostic with a normal-approximation band
- binned return counts for histogram plot data
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd

from src.classical.result import normal_quantile
from src.errors import DomainError, EmptyTailError, InvalidSampleError

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 10
RETURN_KINDS = ("log", "simple")
MEAN_EXCESS_COLUMNS = ["u", "me", "lo", "hi", "count"]


@dataclass(frozen=True)
class ReturnSeries:
    values: np.ndarray = field(compare=False)
    kind: str = "log"
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        if self.kind not in RETURN_KINDS:
            raise DomainError(f"return kind must be one of {RETURN_KINDS}, got {self.kind!r}")
        values = np.asarray(self.values, dtype=float).ravel()
        if self.kind == "simple" and np.any(values <= -1):
            raise InvalidSampleError("simple returns must exceed -1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def to_simple(self) -> "ReturnSeries":
        if self.kind == "simple":
            return self
        return ReturnSeries(np.expm1(self.values), "simple", self.horizon)

    def to_log(self) -> "ReturnSeries":
        if self.kind == "log":
            return self
        return ReturnSeries(np.log1p(self.values), "log", self.horizon)


@dataclass(frozen=True)
class TailData:
    threshold: float
    exceedances: np.ndarray = field(compare=False)
    excesses: np.ndarray = field(compare=False)
    n_tail: int
    n_total: int

    @property
    def f_tilde(self) -> float:
        return self.n_tail / self.n_total


def prices_to_returns(prices: Sequence[float], horizon: int = DEFAULT_HORIZON,
                      kind: str = "log") -> ReturnSeries:
    """Non-overlapping returns p[k+h]/p[k] at k = 0, h, 2h, ...; the remainder is dropped."""
    if int(horizon) != horizon or horizon < 1:
        raise DomainError(f"horizon must be a positive integer, got {horizon!r}")
    p = np.asarray(prices, dtype=float).ravel()
    if p.size < horizon + 1:
        raise InvalidSampleError(f"need at least {horizon + 1} prices for horizon {horizon}, got {p.size}")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise InvalidSampleError("prices must be positive and finite")
    anchors = p[::int(horizon)]
    ratio = anchors[1:] / anchors[:-1]
    values = np.log(ratio) if kind == "log" else ratio - 1.0
    logger.info("Computed %d %s returns over %d-day periods from %d prices",
                values.size, kind, horizon, p.size)
    return ReturnSeries(values, kind, int(horizon))


def tail_exceedances(returns: ReturnSeries, u: float) -> TailData:
    """Losses beyond u: exceedances |r| for r < -u and their excesses over u."""
    if not u > 0:
        raise DomainError(f"threshold must be positive, got {u!r}")
    values = returns.values
    exceedances = -values[values < -u]
    if exceedances.size == 0:
        raise EmptyTailError(f"no return below -{u}; calibration impossible")
    logger.info("Threshold %.4g: %d of %d returns in the tail", u, exceedances.size, values.size)
    return TailData(threshold=float(u), exceedances=exceedances, excesses=exceedances - u,
                    n_tail=int(exceedances.size), n_total=int(values.size))


def empirical_mean_excess(sample, u_grid, level: float = 0.95) -> pd.DataFrame:
    """Mean excess over each grid point with a +/- z*sd/sqrt(m) band.

    Grid points with fewer than two exceedances are omitted.
    """
    grid = np.asarray(u_grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("mean-excess grid is empty")
    x = np.asarray(sample, dtype=float).ravel()
    z = normal_quantile(level)
    rows = []
    for u in grid:
        excess = x[x > u] - u
        m = excess.size
        if m < 2:
            continue
        me = float(excess.mean())
        half = z * float(excess.std(ddof=1)) / np.sqrt(m)
        rows.append({"u": float(u), "me": me, "lo": me - half, "hi": me + half, "count": m})
    return pd.DataFrame(rows, columns=MEAN_EXCESS_COLUMNS)


def mean_excess_grid(sample, points: int = 50) -> np.ndarray:
    """Evenly spaced grid from the minimum to the third-largest observation."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size < 3:
        raise InvalidSampleError("mean-excess diagnostic needs at least 3 observations")
    return np.linspace(x[0], x[-3], int(points))


def histogram_counts(values, bins: int = 30) -> pd.DataFrame:
    """Binned counts (left, right, count) for histogram plot data."""
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=int(bins))
    return pd.DataFrame({"left": edges[:-1], "right": edges[1:], "count": counts})
