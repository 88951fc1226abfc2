"""
Value-at-Risk from a fitted GPD tail.

VaR_eps = u + (sigma/kappa)(1 - ((1 - eps)/F)^kappa), F the empirical tail
fraction; u + sigma*log(F/(1 - eps)) at kappa = 0. Results are in the
loss units of the fitted returns (log-loss for log returns).
"""

import numpy as np

from src.errors import DomainError, OutOfTailError, ParameterDomainError

_TAIL_SLACK = 1e-12


def var_quantile(epsilon: float, u: float, kappa, sigma, f_tilde: float):
    """Loss quantile at level epsilon; vectorised over kappa and sigma."""
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not 0 < f_tilde <= 1:
        raise DomainError(f"tail fraction must lie in (0, 1], got {f_tilde!r}")
    if not u > 0:
        raise DomainError(f"threshold must be positive, got {u!r}")
    if 1.0 - epsilon > f_tilde * (1.0 + _TAIL_SLACK):
        raise OutOfTailError(
            f"1 - epsilon = {1.0 - epsilon:.6g} exceeds the tail fraction {f_tilde:.6g}; quantile below threshold"
        )
    k = np.asarray(kappa, dtype=float)
    s = np.asarray(sigma, dtype=float)
    if np.any(s <= 0):
        raise ParameterDomainError("sigma must be positive")
    log_r = min(np.log((1.0 - epsilon) / f_tilde), 0.0)
    safe_k = np.where(k == 0.0, 1.0, k)
    growth = np.where(k == 0.0, -log_r, -np.expm1(k * log_r) / safe_k)
    out = u + s * growth
    return float(out) if out.ndim == 0 else out


def to_simple_loss(value):
    """Convert a log-loss to a simple-return loss: 1 - exp(-v)."""
    out = -np.expm1(-np.asarray(value, dtype=float))
    return float(out) if out.ndim == 0 else out
