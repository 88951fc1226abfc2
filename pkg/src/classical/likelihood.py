"""
GPD log-likelihood and maximum likelihood estimation

The log-likelihood of GPD(kappa, sigma) is

    -n log sigma + (1/kappa - 1) * sum log(1 - kappa x_i / sigma)

with the exponential form -n log sigma - sum x_i / sigma at kappa = 0.
Points outside the support evaluate to -inf so optimisers can step outside it.

The MLE is found by BFGS (Wolfe line search, analytic gradient) over
(omega, tau) with kappa = 1 - exp(omega) < 1 and sigma = exp(tau).
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from src.classical.pwm import pwm_fit
from src.classical.result import DEFAULT_LEVEL, FitResult, positive_sample, wald_interval
from src.errors import CalibrationError, DomainError, InvalidSampleError, ParameterDomainError

logger = logging.getLogger(__name__)

GRADIENT_TOLERANCE = 1e-8
MAX_ITERATIONS = 500
RESTARTS = 3
SMALL_KAPPA = 1e-8
COVARIANCE_LIMIT = 0.5


def _as_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise InvalidSampleError("sample is empty")
    return x


def gpd_loglik(kappa: float, sigma: float, sample) -> float:
    """Log-likelihood; -inf outside the support."""
    if not sigma > 0:
        raise ParameterDomainError(f"sigma must be positive, got {sigma!r}")
    x = _as_sample(sample)
    n = x.size
    if np.any(x < 0):
        return -math.inf
    if kappa == 0.0:
        return float(-n * math.log(sigma) - x.sum() / sigma)
    coef = 1.0 / kappa - 1.0
    t = -kappa * x / sigma
    if np.any(t < -1.0):
        return -math.inf
    if coef == 0.0:
        return float(-n * math.log(sigma))
    if np.any(t == -1.0):
        # endpoint has zero density for kappa < 1 and is excluded for kappa > 1
        return -math.inf
    return float(-n * math.log(sigma) + coef * np.log1p(t).sum())


def gpd_loglik_grad(kappa: float, sigma: float, sample) -> np.ndarray:
    """Gradient of the log-likelihood in (kappa, log sigma)."""
    x = _as_sample(sample)
    n = x.size
    y = x / sigma
    if abs(kappa) < SMALL_KAPPA:
        return np.array([np.sum(y - 0.5 * y * y), -n + y.sum()])
    z = 1.0 - kappa * y
    d_kappa = -np.log(z).sum() / kappa ** 2 - (1.0 / kappa - 1.0) * np.sum(y / z)
    d_tau = -n + (1.0 - kappa) * np.sum(y / z)
    return np.array([d_kappa, d_tau])


def mle_covariance(kappa: float, sigma: float, n: int) -> Optional[np.ndarray]:
    """Asymptotic covariance (1/n)[[(1-k)^2, s(1-k)], [s(1-k), 2 s^2 (1-k)]] for kappa < 1/2."""
    if kappa >= COVARIANCE_LIMIT:
        return None
    a = 1.0 - kappa
    return np.array([[a * a, sigma * a], [sigma * a, 2.0 * sigma * sigma * a]]) / n


def _objective(theta: np.ndarray, x: np.ndarray) -> Tuple[float, np.ndarray]:
    """-loglik/n and its gradient in (omega, tau)."""
    omega, tau = theta
    kappa = -math.expm1(omega)
    sigma = math.exp(tau)
    value = gpd_loglik(kappa, sigma, x)
    if not math.isfinite(value):
        return math.inf, np.zeros(2)
    g_kappa, g_tau = gpd_loglik_grad(kappa, sigma, x)
    n = x.size
    return -value / n, np.array([g_kappa * math.exp(omega) / n, -g_tau / n])


def _admissible(kappa: float, sigma: float, x_max: float) -> Tuple[float, float]:
    """Clip an initial point below kappa = 1 and inside the support."""
    kappa = min(kappa, 0.99)
    if kappa > 0 and sigma <= kappa * x_max:
        sigma = 1.1 * kappa * x_max
    return kappa, sigma


def _default_init(x: np.ndarray) -> Tuple[float, float]:
    """PWM estimates when usable, else a moment-sign hint."""
    try:
        fit = pwm_fit(x)
        if fit.kappa < 1 and (fit.kappa <= 0 or fit.sigma > fit.kappa * x.max()):
            return fit.kappa, fit.sigma
    except CalibrationError as e:
        logger.debug("PWM init unavailable: %s", e)
    mean = float(x.mean())
    cv = float(x.std(ddof=1)) / mean if x.size > 1 and mean > 0 else 1.0
    # GPD squared coefficient of variation is 1/(1 + 2 kappa)
    hint = 1.0 if cv < 1.0 else -1.0
    return 0.1 * hint, mean


def _run_bfgs(x: np.ndarray, kappa0: float, sigma0: float):
    theta0 = np.array([math.log1p(-kappa0), math.log(sigma0)])
    return minimize(_objective, theta0, args=(x,), jac=True, method="BFGS",
                    options={"gtol": GRADIENT_TOLERANCE * 1e-2, "maxiter": MAX_ITERATIONS})


def gpd_mle(sample, init: Optional[Tuple[float, float]] = None,
            level: float = DEFAULT_LEVEL) -> FitResult:
    """Maximum likelihood fit with Wald intervals when kappa < 1/2."""
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    x = positive_sample(sample)
    n = x.size
    x_max = float(x.max())

    kappa0, sigma0 = init if init is not None else _default_init(x)
    if sigma0 <= 0:
        raise ParameterDomainError(f"initial sigma must be positive, got {sigma0}")
    kappa0, sigma0 = _admissible(kappa0, sigma0, x_max)

    best = _run_bfgs(x, kappa0, sigma0)
    converged = _gradient_norm(best.x, x) < GRADIENT_TOLERANCE
    if not converged:
        rng = np.random.default_rng(0)
        for attempt in range(RESTARTS):
            k_j, s_j = _admissible(kappa0 + rng.normal(0.0, 0.1),
                                   sigma0 * math.exp(rng.normal(0.0, 0.2)), x_max)
            res = _run_bfgs(x, k_j, s_j)
            logger.debug("MLE restart %d: objective %.6g", attempt + 1, res.fun)
            if res.fun < best.fun:
                best = res
            if _gradient_norm(best.x, x) < GRADIENT_TOLERANCE:
                converged = True
                break

    kappa = -math.expm1(best.x[0])
    sigma = math.exp(best.x[1])
    if not converged:
        logger.warning("GPD MLE did not converge (n=%d); returning best point kappa=%.4f", n, kappa)

    cov = mle_covariance(kappa, sigma, n)
    ci_kappa = ci_sigma = None
    if cov is not None:
        ci_kappa = wald_interval(kappa, math.sqrt(cov[0, 0]), level)
        ci_sigma = wald_interval(sigma, math.sqrt(cov[1, 1]), level)
    return FitResult(kappa=kappa, sigma=sigma, method="MLE", n=n, level=level,
                     covariance=cov, ci_kappa=ci_kappa, ci_sigma=ci_sigma,
                     converged=converged, objective_value=gpd_loglik(kappa, sigma, x))


def _gradient_norm(theta: np.ndarray, x: np.ndarray) -> float:
    """Norm of the per-observation log-likelihood gradient in (kappa, log sigma)."""
    kappa = -math.expm1(theta[0])
    sigma = math.exp(theta[1])
    if not math.isfinite(gpd_loglik(kappa, sigma, x)):
        return math.inf
    return float(np.linalg.norm(gpd_loglik_grad(kappa, sigma, x)) / x.size)
