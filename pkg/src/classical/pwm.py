"""
Probability-weighted-moments estimator for the GPD.

Moments mu_s = E[X (1 - F(X))^s] = sigma/((s+1)(s+1+kappa)) are matched for
s = 0, 1 using plotting positions p_(i) = (i - 0.35)/n.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from src.classical.result import DEFAULT_LEVEL, FitResult, positive_sample, wald_interval
from src.errors import DomainError, EstimatorUndefinedError

logger = logging.getLogger(__name__)

PLOTTING_SHIFT = 0.35
COVARIANCE_RANGE = (-0.5, 0.5)  # shape variance diverges at -1/2, estimates exist down to -1


def sample_pwm(sample) -> Tuple[float, float]:
    """Empirical (mu0, mu1) from the sorted sample."""
    x = np.sort(positive_sample(sample))
    n = x.size
    p = (np.arange(1, n + 1) - PLOTTING_SHIFT) / n
    return float(np.mean(x)), float(np.mean(x * (1.0 - p)))


def pwm_from_moments(mu0: float, mu1: float) -> Tuple[float, float]:
    """Invert mu0, mu1 into (kappa, sigma)."""
    den = mu0 - 2.0 * mu1
    if den == 0 or abs(den) <= 1e-14 * abs(mu0):
        raise EstimatorUndefinedError("mu0 = 2*mu1; PWM estimator undefined")
    kappa = mu0 / den - 2.0
    sigma = 2.0 * mu0 * mu1 / den
    if sigma <= 0:
        raise EstimatorUndefinedError(f"PWM scale is not positive ({sigma:.4g})")
    return kappa, sigma


def pwm_covariance(kappa: float, sigma: float, n: int) -> Optional[np.ndarray]:
    """Asymptotic covariance, or None outside (-1/2, 1/2)."""
    lo, hi = COVARIANCE_RANGE
    if not lo < kappa < hi:
        return None
    k = kappa
    c = 1.0 / (n * (1 + 2 * k) * (3 + 2 * k))
    v11 = (1 + k) * (2 + k) ** 2 * (1 + k + 2 * k ** 2)
    v12 = sigma * (2 + k) * (2 + 6 * k + 7 * k ** 2 + 2 * k ** 3)
    v22 = sigma ** 2 * (7 + 18 * k + 11 * k ** 2 + 2 * k ** 3)
    return c * np.array([[v11, v12], [v12, v22]])


def pwm_fit(sample, level: float = DEFAULT_LEVEL) -> FitResult:
    """PWM estimates with Wald intervals when the covariance is valid."""
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    mu0, mu1 = sample_pwm(sample)
    n = int(np.size(sample))
    kappa, sigma = pwm_from_moments(mu0, mu1)
    cov = pwm_covariance(kappa, sigma, n)
    ci_kappa = ci_sigma = None
    if cov is not None:
        ci_kappa = wald_interval(kappa, float(np.sqrt(cov[0, 0])), level)
        ci_sigma = wald_interval(sigma, float(np.sqrt(cov[1, 1])), level)
    else:
        logger.debug("PWM covariance omitted for kappa=%.4f", kappa)
    return FitResult(kappa=kappa, sigma=sigma, method="PWM", n=n, level=level,
                     covariance=cov, ci_kappa=ci_kappa, ci_sigma=ci_sigma)
