"""
Intrinsic discrepancies for the inverted-Pareto model.

The intrinsic discrepancy is the smaller of the two directed KL divergences
between members of the model, scaled by the sample size n.
"""

import math

import numpy as np

from src.errors import ParameterDomainError


def kl_divergence_ip(kappa_1: float, kappa_2: float, n: int = 1) -> float:
    """n * KL(IP(kappa_1, sigma) || IP(kappa_2, sigma)); free of sigma."""
    if kappa_1 <= 0 or kappa_2 <= 0:
        raise ParameterDomainError("shapes must be positive")
    theta = kappa_1 / kappa_2
    return n * (math.log(theta) + 1.0 / theta - 1.0)


def delta_shape(kappa, kappa_e, n: int):
    """Shape discrepancy with theta = kappa/kappa_e.

    n(-log theta + theta - 1) when theta < 1, n(log theta + 1/theta - 1)
    otherwise. Vectorised over kappa.
    """
    k = np.asarray(kappa, dtype=float)
    if np.any(k <= 0) or kappa_e <= 0:
        raise ParameterDomainError("shapes must be positive")
    theta = k / kappa_e
    log_theta = np.log(theta)
    out = np.where(theta < 1, -log_theta + theta - 1.0, log_theta + 1.0 / theta - 1.0)
    out = n * out
    return float(out) if out.ndim == 0 else out


def delta_scale(sigma, kappa, sigma_e: float, n: int):
    """Scale discrepancy with phi = kappa*log(sigma/sigma_e).

    n*log(1 - phi) when phi < 0, n*phi otherwise.
    """
    s = np.asarray(sigma, dtype=float)
    k = np.asarray(kappa, dtype=float)
    if np.any(s <= 0) or np.any(k <= 0) or sigma_e <= 0:
        raise ParameterDomainError("scale and shape arguments must be positive")
    phi = k * np.log(s / sigma_e)
    out = n * np.where(phi < 0, np.log1p(-np.minimum(phi, 0.0)), phi)
    return float(out) if out.ndim == 0 else out
