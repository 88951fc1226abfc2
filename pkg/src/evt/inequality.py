"""Lorenz curve and Gini index of the GPD; both depend on the shape only."""

import numpy as np

from src.errors import DomainError, MomentExistenceError


def _check_kappa(kappa):
    k = np.asarray(kappa, dtype=float)
    if np.any(k <= -1):
        raise MomentExistenceError(f"Lorenz/Gini need kappa > -1 (finite mean), got {kappa!r}")
    return k


def gini_index(kappa):
    """G = 1/(kappa + 2)."""
    k = _check_kappa(kappa)
    out = 1.0 / (k + 2.0)
    return float(out) if out.ndim == 0 else out


def lorenz_curve(kappa: float, u):
    """L(u) = ((1-u)^(kappa+1) + (kappa+1)u - 1)/kappa, with u + (1-u)log(1-u) at kappa = 0."""
    k = float(_check_kappa(kappa))
    uu = np.asarray(u, dtype=float)
    if np.any((uu < 0) | (uu > 1)):
        raise DomainError(f"Lorenz argument must lie in [0, 1], got {u!r}")
    inner = uu < 1
    out = np.ones_like(uu)
    ui = uu[inner]
    log_tail = np.log1p(-ui)
    growth = log_tail if k == 0.0 else np.expm1(k * log_tail) / k
    out[inner] = ui + (1.0 - ui) * growth
    return float(out) if out.ndim == 0 else out


def lorenz_gini(kappa: float, u=None):
    """(L(u) or None, G)."""
    lorenz = None if u is None else lorenz_curve(kappa, u)
    return lorenz, gini_index(kappa)
