"""
Pareto-Gamma conjugate analysis for the inverted-Pareto shape.

Prior: kappa ~ Ga(c, d) and sigma | kappa ~ Pa(k*kappa, b). Integrating
sigma out of the joint posterior leaves a Gamma law for kappa. The
reference prior (kappa*sigma)^-1 gives Ga(n - 1, n/kappa_hat).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as sps

from src.errors import DegenerateSampleError, ParameterDomainError
from src.intrinsic.stats import SuffStats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParetoGammaHyper:
    k: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("k", "b", "c", "d"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterDomainError(f"hyperparameter {name} must be positive, got {value!r}")


@dataclass(frozen=True)
class GammaPosterior:
    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ParameterDomainError(f"Gamma posterior needs shape, rate > 0, got {self.shape}, {self.rate}")

    @property
    def law(self):
        """Frozen scipy Gamma distribution."""
        return sps.gamma(a=self.shape, scale=1.0 / self.rate)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate ** 2

    def pdf(self, kappa):
        return self.law.pdf(kappa)

    def cdf(self, kappa):
        return self.law.cdf(kappa)

    def ppf(self, q):
        return self.law.ppf(q)


def pareto_gamma_update(hyper: Optional[ParetoGammaHyper], stats: SuffStats) -> GammaPosterior:
    """Marginal posterior of the shape.

    hyper=None selects the reference limit Ga(n - 1, n/kappa_hat). Otherwise
    the result is Ga(n + c, d + q) with s = max(t2, b) and
    q = n*log(s/t1) + k*log(s/b).
    """
    if stats.n < 1:
        raise DegenerateSampleError("posterior needs at least one observation")
    if stats.n > 1 and not stats.t1 < stats.t2:
        raise DegenerateSampleError("all observations are equal; shape posterior is improper")

    if hyper is None:
        if stats.n < 2:
            raise DegenerateSampleError("reference posterior needs n >= 2")
        kappa_hat = 1.0 / math.log(stats.t2 / stats.t1)
        return GammaPosterior(shape=stats.n - 1.0, rate=stats.n / kappa_hat)

    s = max(stats.t2, hyper.b)
    q = stats.n * math.log(s / stats.t1) + hyper.k * math.log(s / hyper.b)
    return GammaPosterior(shape=stats.n + hyper.c, rate=hyper.d + q)
