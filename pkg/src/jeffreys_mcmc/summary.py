"""Posterior summaries of a Jeffreys chain, including draw-wise Gini and VaR."""

import logging
from dataclasses import dataclass
from typing import Optional

import emcee
import numpy as np

from src.errors import DomainError, InsufficientDrawsError
from src.evt.inequality import gini_index
from src.evt.risk import var_quantile
from src.jeffreys_mcmc.chain import ChainOutput

logger = logging.getLogger(__name__)

MIN_DRAWS = 100


@dataclass(frozen=True)
class ParameterSummary:
    median: float
    mean: float
    sd: float
    lower: float
    upper: float


@dataclass(frozen=True)
class ChainSummary:
    kappa: ParameterSummary
    sigma: ParameterSummary
    probability: float
    retained: int
    ess_kappa: float
    ess_sigma: float
    gini: Optional[ParameterSummary] = None
    var: Optional[ParameterSummary] = None


def describe(draws, p: float) -> ParameterSummary:
    """Median, mean, sd and the equal-tailed interval of mass p."""
    d = np.asarray(draws, dtype=float)
    lower, median, upper = np.quantile(d, [(1.0 - p) / 2.0, 0.5, (1.0 + p) / 2.0])
    sd = float(d.std(ddof=1)) if d.size > 1 else 0.0
    return ParameterSummary(median=float(median), mean=float(d.mean()), sd=sd,
                            lower=float(lower), upper=float(upper))


def effective_sample_size(draws) -> float:
    """n over emcee's integrated autocorrelation time, capped at the number of draws."""
    x = np.asarray(draws, dtype=float)
    n = x.size
    if n < 4 or not np.any(x - x.mean()):
        return float(n)
    tau = float(emcee.autocorr.integrated_time(x, quiet=True)[0])
    return float(n / max(tau, 1.0))


def summarize(output: ChainOutput, p: float = 0.95, threshold: Optional[float] = None,
              f_tilde: Optional[float] = None, epsilon: Optional[float] = None) -> ChainSummary:
    """Summaries of kappa and sigma; Gini always, VaR when the POT context is given."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if output.retained < MIN_DRAWS:
        raise InsufficientDrawsError(f"need at least {MIN_DRAWS} retained draws, got {output.retained}")
    kappa, sigma = output.kappa, output.sigma

    admissible = kappa > -1.0
    excluded = int(kappa.size - admissible.sum())
    if excluded:
        logger.warning("Gini undefined for %d of %d draws with kappa <= -1; excluded", excluded, kappa.size)
    gini = describe(gini_index(kappa[admissible]), p) if admissible.any() else None

    var = None
    if threshold is not None and f_tilde is not None and epsilon is not None:
        var = describe(var_quantile(epsilon, threshold, kappa, sigma, f_tilde), p)

    return ChainSummary(kappa=describe(kappa, p), sigma=describe(sigma, p), probability=p,
                        retained=output.retained, ess_kappa=effective_sample_size(kappa),
                        ess_sigma=effective_sample_size(sigma), gini=gini, var=var)
