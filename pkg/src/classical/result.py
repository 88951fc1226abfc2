"""Shared result type for the frequentist GPD estimators."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.stats import norm

from src.errors import InvalidSampleError

DEFAULT_LEVEL = 0.95


@dataclass(frozen=True)
class FitResult:
    kappa: float
    sigma: float
    method: str
    n: int
    level: float = DEFAULT_LEVEL
    covariance: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    ci_kappa: Optional[Tuple[float, float]] = None
    ci_sigma: Optional[Tuple[float, float]] = None
    converged: bool = True
    objective_value: Optional[float] = None

    @property
    def se_kappa(self) -> Optional[float]:
        return None if self.covariance is None else float(np.sqrt(self.covariance[0, 0]))

    @property
    def se_sigma(self) -> Optional[float]:
        return None if self.covariance is None else float(np.sqrt(self.covariance[1, 1]))


def normal_quantile(level: float) -> float:
    """Two-sided standard normal critical value (1.959964 at 0.95)."""
    return float(norm.ppf(0.5 + level / 2.0))


def wald_interval(point: float, se: float, level: float = DEFAULT_LEVEL) -> Tuple[float, float]:
    half = normal_quantile(level) * se
    return point - half, point + half


def positive_sample(sample, minimum: int = 2) -> np.ndarray:
    """Validated float copy of a positive sample of at least `minimum` points."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < minimum:
        raise InvalidSampleError(f"need at least {minimum} observations, got {x.size}")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise InvalidSampleError("sample entries must be positive and finite")
    return x
