"""
Sufficient statistics and maximum likelihood for the inverted Pareto.

The likelihood of an InvPareto(kappa, sigma) sample factors through
t1 (geometric mean) and t2 (maximum):

    kappa^n sigma^(-n kappa) t1^(n kappa) / t1^n,   sigma >= t2
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.errors import DegenerateSampleError, InvalidSampleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuffStats:
    t1: float
    t2: float
    n: int

    @classmethod
    def from_mle(cls, n: int, kappa_hat: float, sigma_hat: float = 1.0) -> "SuffStats":
        """Statistics consistent with a reported (n, kappa_hat, sigma_hat)."""
        if n < 1 or kappa_hat <= 0 or sigma_hat <= 0:
            raise InvalidSampleError(
                f"need n >= 1 and positive estimates, got n={n}, kappa_hat={kappa_hat}, sigma_hat={sigma_hat}"
            )
        return cls(t1=sigma_hat * math.exp(-1.0 / kappa_hat), t2=sigma_hat, n=int(n))


@dataclass(frozen=True)
class IpMle:
    kappa_hat: float
    sigma_hat: float


def suff_stats(sample) -> SuffStats:
    """Geometric mean, maximum and size of a positive sample."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise InvalidSampleError("sample is empty")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise InvalidSampleError("sample entries must be positive and finite")
    t2 = float(x.max())
    t1 = float(np.exp(np.mean(np.log(x))))
    # rounding can push the geometric mean a hair above the max
    return SuffStats(t1=min(t1, t2), t2=t2, n=int(x.size))


def ip_mle(stats: SuffStats) -> IpMle:
    """kappa_hat = 1/log(t2/t1), sigma_hat = t2."""
    if stats.n < 2:
        raise DegenerateSampleError(f"shape MLE needs n >= 2, got n={stats.n}")
    if not stats.t1 < stats.t2:
        raise DegenerateSampleError("all observations are equal; shape MLE undefined")
    return IpMle(kappa_hat=1.0 / math.log(stats.t2 / stats.t1), sigma_hat=stats.t2)
