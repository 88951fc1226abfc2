"""
Bayesian reference-intrinsic (BRI) estimation for the inverted Pareto

Shape:
- reference posterior kappa | x ~ Ga(n - 1, n/kappa_hat)
- expected loss d(kappa_e) = E[delta_shape(kappa, kappa_e, n) | x]
- point estimate argmin d, interval {kappa : d(kappa) <= level} of mass p

The posterior is a scale family in kappa_hat and delta_shape depends on
kappa/kappa_e only, so every shape quantity equals kappa_hat times its
value at kappa_hat = 1. The unit problems are cached per sample size.

Scale: the expected scale discrepancy under the joint posterior
kappa^n sigma^-(n kappa + 1) t1^(n kappa), sigma >= t2, is minimised over
sigma_e >= sigma_hat by nested quadrature.

Usage:
    from src.intrinsic.bri import fit_bri_shape, bri_scale, to_gpd
    fit = to_gpd(fit_bri_shape(stats, p=0.95))
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, minimize_scalar
from scipy.special import digamma, gammainc, gammaincc
from scipy.stats import gamma as gamma_law

from src.distributions.conjugate import GammaPosterior, pareto_gamma_update
from src.errors import DomainError, ParameterDomainError, UndefinedLossError
from src.intrinsic.loss import delta_shape
from src.intrinsic.stats import SuffStats, ip_mle

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
APPROXIMATION = "approximation"
MODES = (NUMERIC, APPROXIMATION)

IP_SHAPE = "ip-shape"
GPD_SHAPE = "gpd-shape"

QUAD_EPSREL = 1e-11
ROOT_XTOL = 1e-13
_MAX_EXPANSIONS = 200
_TAIL_MASS = 1e-12


@dataclass(frozen=True)
class BriFit:
    point: float
    interval: Tuple[float, float]
    probability: float
    expected_loss_at_point: float
    method: str
    parameter: str = IP_SHAPE


def _check_mode(mode: str):
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")


def _check_loss_defined(n: int):
    if n <= 2:
        raise UndefinedLossError(f"expected intrinsic loss is infinite for n <= 2 (got n={n})")


def _check_probability(p: float):
    if not 0 < p < 1:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")


def _check_shape(kappa_hat: float):
    if not (math.isfinite(kappa_hat) and kappa_hat > 0):
        raise ParameterDomainError(f"kappa_hat must be positive, got {kappa_hat!r}")


# --- shape: unit problem (kappa_hat = 1, posterior Ga(n - 1, n)) ---

def _partial_log_moment(x: float, a: float, rate: float) -> float:
    """E[log(k); k <= x] for k ~ Ga(a, rate)."""
    log_norm = a * math.log(rate) - math.lgamma(a)

    def integrand(k: float) -> float:
        return math.log(k) * math.exp(log_norm + (a - 1.0) * math.log(k) - rate * k)

    upper = min(x, float(gamma_law.isf(1e-18, a, scale=1.0 / rate)))
    mode = (a - 1.0) / rate
    points = [mode] if 0 < mode < upper else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(integrand, 0.0, upper, points=points,
                        epsabs=1e-15, epsrel=QUAD_EPSREL, limit=200)
    return value


def _unit_expected_loss(x: float, n: int) -> float:
    """d(x) for kappa_hat = 1, split at x into closed-form Gamma pieces."""
    a, r = n - 1.0, float(n)
    rx = r * x
    f = gammainc(a, rx)
    upper_inv = (r / (a - 1.0)) * gammaincc(a - 1.0, rx)   # E[1/k; k > x]
    lower_lin = (a / r) * gammainc(a + 1.0, rx)             # E[k; k <= x]
    log_x = math.log(x)
    e_log = digamma(a) - math.log(r)
    partial_log = _partial_log_moment(x, a, r)
    below = -partial_log + (log_x - 1.0) * f + lower_lin / x
    above = (e_log - partial_log) - (log_x + 1.0) * (1.0 - f) + x * upper_inv
    return float(n * (below + above))


def _unit_expected_loss_grad(x: float, n: int) -> float:
    """Derivative of the unit expected loss in x."""
    a, r = n - 1.0, float(n)
    rx = r * x
    f = gammainc(a, rx)
    return float(n * ((2.0 * f - 1.0) / x
                      - (a / r) * gammainc(a + 1.0, rx) / x ** 2
                      + (r / (a - 1.0)) * gammaincc(a - 1.0, rx)))


@lru_cache(maxsize=1024)
def _unit_bri_point(n: int) -> float:
    """Root of the loss gradient, bracketed around kappa_hat = 1."""
    lo, hi = 0.1, 10.0
    while _unit_expected_loss_grad(lo, n) > 0:
        lo /= 2.0
    while _unit_expected_loss_grad(hi, n) < 0:
        hi *= 2.0
    return brentq(_unit_expected_loss_grad, lo, hi, args=(n,), xtol=ROOT_XTOL)


def _grad_sign_changes(n: int, center: float) -> int:
    grid = np.geomspace(center / 20.0, center * 20.0, 200)
    signs = np.sign([_unit_expected_loss_grad(x, n) for x in grid])
    signs = signs[signs != 0]
    return int(np.count_nonzero(np.diff(signs)))


def _grid_region(loss: Callable[[float], float], cdf: Callable[[float], float],
                 lo: float, hi: float, p: float, points: int = 4000) -> Tuple[float, float]:
    """Mass-matched lowest-loss cells on a grid; returns their hull."""
    edges = np.linspace(lo, hi, points + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    masses = np.diff([cdf(e) for e in edges])
    order = np.argsort([loss(m) for m in mids])
    chosen = order[: int(np.searchsorted(np.cumsum(masses[order]), p)) + 1]
    logger.warning("Intrinsic region selected %d grid cells in fallback mode", len(chosen))
    return float(edges[chosen.min()]), float(edges[chosen.max() + 1])


@lru_cache(maxsize=1024)
def _unit_bri_interval(n: int, p: float) -> Tuple[float, float]:
    a, r = n - 1.0, float(n)

    def cdf(x: float) -> float:
        return float(gammainc(a, r * x))

    def loss(x: float) -> float:
        return _unit_expected_loss(x, n)

    center = _unit_bri_point(n)
    if _grad_sign_changes(n, center) != 1:
        logger.warning("Expected loss is not unimodal for n=%d; using grid fallback", n)
        lo_q = float(gamma_law.ppf(_TAIL_MASS, a, scale=1.0 / r))
        hi_q = float(gamma_law.isf(_TAIL_MASS, a, scale=1.0 / r))
        return _grid_region(loss, cdf, lo_q, hi_q, p)
    return intrinsic_region(loss, cdf, center, p, lower=0.0)


# --- shape: public operations ---

def intrinsic_region(loss: Callable[[float], float], cdf: Callable[[float], float],
                     center: float, p: float, lower: float = -math.inf,
                     upper: float = math.inf) -> Tuple[float, float]:
    """Level set of a unimodal loss holding posterior mass p.

    loss is minimised at center; cdf is the posterior CDF in the same
    coordinate. The loss level is matched to the mass by a bracketed root
    search, so the result transforms exactly under monotone maps.
    """
    _check_probability(p)
    base = loss(center)

    def crossing(level: float, direction: int) -> float:
        bound = lower if direction < 0 else upper
        step = 0.1 * max(abs(center), 1.0)
        inner = center
        for _ in range(_MAX_EXPANSIONS):
            outer = center + direction * step
            if math.isfinite(bound) and (outer - bound) * direction >= 0:
                outer = 0.5 * (inner + bound)
            if loss(outer) >= level:
                a, b = sorted((inner, outer))
                return brentq(lambda t: loss(t) - level, a, b, xtol=ROOT_XTOL)
            inner = outer
            step *= 2.0
        raise DomainError(f"loss never reaches level {level} on side {direction}")

    def mass_gap(level: float) -> float:
        if level <= base:
            return -p
        return cdf(crossing(level, 1)) - cdf(crossing(level, -1)) - p

    width = 1.0
    for _ in range(_MAX_EXPANSIONS):
        if mass_gap(base + width) >= 0:
            break
        width *= 2.0
    level = brentq(mass_gap, base, base + width, xtol=1e-14)
    return crossing(level, -1), crossing(level, 1)


def reference_posterior(n: int, kappa_hat: float) -> GammaPosterior:
    """Ga(n - 1, n/kappa_hat)."""
    _check_shape(kappa_hat)
    return pareto_gamma_update(None, SuffStats.from_mle(n, kappa_hat))


def expected_loss_shape(kappa_e: float, n: int, kappa_hat: float) -> float:
    """Posterior expected shape discrepancy at kappa_e."""
    _check_loss_defined(n)
    _check_shape(kappa_hat)
    _check_shape(kappa_e)
    return _unit_expected_loss(kappa_e / kappa_hat, n)


def expected_loss_shape_grad(kappa_e: float, n: int, kappa_hat: float) -> float:
    """Derivative of expected_loss_shape with respect to kappa_e."""
    _check_loss_defined(n)
    _check_shape(kappa_hat)
    _check_shape(kappa_e)
    return _unit_expected_loss_grad(kappa_e / kappa_hat, n) / kappa_hat


def expected_loss_shape_approx(kappa_e, n: int, kappa_hat: float):
    """delta_shape(kappa_hat, kappa_e, n) + 1/2."""
    return delta_shape(kappa_hat, kappa_e, n) + 0.5


def bri_shape(n: int, kappa_hat: float, mode: str = NUMERIC) -> float:
    """BRI point estimate of the inverted-Pareto shape."""
    _check_mode(mode)
    _check_shape(kappa_hat)
    if mode == APPROXIMATION:
        if n < 2:
            raise UndefinedLossError(f"approximation needs n >= 2, got n={n}")
        return kappa_hat * (1.0 - 3.0 / (2.0 * n))
    _check_loss_defined(n)
    return kappa_hat * _unit_bri_point(int(n))


def bri_interval_shape(n: int, kappa_hat: float, p: float = 0.95) -> Tuple[float, float]:
    """Intrinsic credible interval of posterior mass p."""
    _check_loss_defined(n)
    _check_shape(kappa_hat)
    _check_probability(p)
    lo, hi = _unit_bri_interval(int(n), float(p))
    return kappa_hat * lo, kappa_hat * hi


def hpd_interval_shape(n: int, kappa_hat: float, p: float = 0.95) -> Tuple[float, float]:
    """Highest posterior density interval of the reference posterior."""
    _check_probability(p)
    law = reference_posterior(n, kappa_hat).law

    def width(t: float) -> float:
        return float(law.ppf(t + p) - law.ppf(t))

    res = minimize_scalar(width, bounds=(0.0, 1.0 - p), method="bounded",
                          options={"xatol": 1e-12})
    return float(law.ppf(res.x)), float(law.ppf(res.x + p))


def fit_bri_shape(stats: SuffStats, p: float = 0.95, mode: str = NUMERIC) -> BriFit:
    """Point, interval and expected loss for the shape from sufficient statistics."""
    _check_mode(mode)
    _check_probability(p)
    kappa_hat = ip_mle(stats).kappa_hat
    n = stats.n
    point = bri_shape(n, kappa_hat, mode)
    if mode == NUMERIC:
        interval = bri_interval_shape(n, kappa_hat, p)
        loss_at_point = expected_loss_shape(point, n, kappa_hat)
    else:
        # the approximate loss is minimised at kappa_hat itself
        posterior = reference_posterior(n, kappa_hat)
        interval = intrinsic_region(
            lambda k: expected_loss_shape_approx(k, n, kappa_hat),
            lambda k: float(posterior.cdf(k)), kappa_hat, p, lower=0.0,
        )
        loss_at_point = expected_loss_shape_approx(point, n, kappa_hat)
    logger.info("BRI shape n=%d kappa_hat=%.4f -> %.4f (%.4f, %.4f)",
                n, kappa_hat, point, interval[0], interval[1])
    return BriFit(point=point, interval=(float(interval[0]), float(interval[1])),
                  probability=p, expected_loss_at_point=float(loss_at_point), method=mode)


def to_gpd(fit: BriFit) -> BriFit:
    """Map a shape fit through alpha -> -1/alpha (an involution)."""
    lo, hi = fit.interval
    if lo * hi <= 0 or fit.point == 0:
        raise DomainError(f"interval {fit.interval} touches 0; -1/alpha undefined")
    new_lo, new_hi = sorted((-1.0 / lo, -1.0 / hi))
    parameter = GPD_SHAPE if fit.parameter == IP_SHAPE else IP_SHAPE
    return replace(fit, point=-1.0 / fit.point, interval=(new_lo, new_hi), parameter=parameter)


# --- scale ---

def _scale_kernel(c: float, n: int) -> float:
    """E[delta_scale] given kappa, with c = n*kappa*log(sigma_e/sigma_hat).

    Conditionally on kappa, n*kappa*log(sigma/sigma_hat) is Exp(1).
    """
    if c <= 0:
        return 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(lambda u: math.log1p((c - u) / n) * math.exp(-u), 0.0, c,
                        epsabs=1e-14, epsrel=1e-10)
    return math.exp(-c) + n * value


def _scale_loss_log(w: float, n: int, kappa_hat: float) -> float:
    """Expected scale loss at sigma_e = sigma_hat*exp(w); n*kappa ~ Ga(n, scale kappa_hat)."""
    lo_s = float(gamma_law.ppf(_TAIL_MASS, n, scale=kappa_hat))
    hi_s = float(gamma_law.isf(_TAIL_MASS, n, scale=kappa_hat))
    log_norm = -n * math.log(kappa_hat) - math.lgamma(n)

    def outer(s: float) -> float:
        weight = math.exp(log_norm + (n - 1.0) * math.log(s) - s / kappa_hat)
        return _scale_kernel(s * w, n) * weight

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(outer, lo_s, hi_s, points=[(n - 1.0) * kappa_hat],
                        epsabs=1e-13, epsrel=1e-9, limit=200)
    return value


def expected_loss_scale(sigma_e: float, n: int, kappa_hat: float, sigma_hat: float) -> float:
    """Posterior expected scale discrepancy for sigma_e >= sigma_hat."""
    _check_shape(kappa_hat)
    if n < 2:
        raise UndefinedLossError(f"scale loss needs n >= 2, got n={n}")
    if sigma_e < sigma_hat:
        raise DomainError(f"sigma_e={sigma_e} below sigma_hat={sigma_hat}")
    return _scale_loss_log(math.log(sigma_e / sigma_hat), n, kappa_hat)


def bri_scale(stats: SuffStats, mode: str = NUMERIC) -> float:
    """BRI estimate of the inverted-Pareto scale."""
    _check_mode(mode)
    mle = ip_mle(stats)
    n = stats.n
    w0 = math.log(2.0) / (n * mle.kappa_hat)
    if mode == APPROXIMATION:
        return mle.sigma_hat * math.exp(w0)
    res = minimize_scalar(_scale_loss_log, bounds=(0.0, 20.0 * w0), method="bounded",
                          args=(n, mle.kappa_hat), options={"xatol": 1e-9 * w0})
    return mle.sigma_hat * math.exp(res.x)


def bri_uniform_scale(n: int, sigma_hat: float) -> Tuple[float, Callable]:
    """Uniform sub-case: point 2^(1/n) sigma_hat and its expected loss.

    The loss is 2z - log z - 1 with z = (sigma_hat/sigma_e)^n for
    sigma_e >= sigma_hat and 1 + log z below it.
    """
    if n < 1 or sigma_hat <= 0:
        raise ParameterDomainError(f"need n >= 1 and sigma_hat > 0, got {n}, {sigma_hat}")

    def expected_loss(sigma_e):
        se = np.asarray(sigma_e, dtype=float)
        log_z = n * np.log(sigma_hat / se)
        z = np.exp(np.minimum(log_z, 0.0))
        out = np.where(log_z <= 0, 2.0 * z - log_z - 1.0, 1.0 + log_z)
        return float(out) if out.ndim == 0 else out

    return sigma_hat * 2.0 ** (1.0 / n), expected_loss


def bri_log_scale(n: int, sigma_hat: float) -> float:
    """Location-exponential estimate on the log scale: log sigma_hat + log(2)/n."""
    return math.log(sigma_hat) + math.log(2.0) / n
