"""
Metropolis-within-Gibbs sampler for the GPD under the independent Jeffreys prior

    pi(kappa, sigma) ~ 1/sigma * 1/(1 - kappa) * 1/sqrt(1 - 2 kappa),  kappa < 1/2

Each iteration updates the shape, then the scale:

- kappa: Gaussian centred at the MLE, truncated above at min(1/2, sigma/x_max)
- sigma: Gamma with mode at the current sigma when kappa < 0, otherwise a
  Gaussian at the current sigma truncated below at kappa * x_max

Truncated draws use the inverse CDF, so a chain is a pure function of its seed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import gammaln, log_ndtr, ndtri_exp

from src.classical.likelihood import gpd_loglik, gpd_mle
from src.classical.result import positive_sample
from src.errors import ChainDiagnosticsError, ConfigError

logger = logging.getLogger(__name__)

KAPPA_LIMIT = 0.5
INITIAL_KAPPA_CAP = 0.49
DEFAULT_ITERATIONS = 1_000_000
DEFAULT_BURN_IN = 10_000
DEFAULT_THIN = 5
DEFAULT_SEED = 42
DEFAULT_GAMMA_SHAPE = 50.0
FALLBACK_KAPPA_SCALE = 0.25
FALLBACK_SIGMA_FRACTION = 0.1

Proposal = Callable[[float, np.random.Generator], Tuple[float, float, float]]


@dataclass(frozen=True)
class ChainConfig:
    iterations: int = DEFAULT_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    thin: int = DEFAULT_THIN
    seed: int = DEFAULT_SEED
    kappa_scale: Optional[float] = None
    sigma_scale: Optional[float] = None
    gamma_shape: float = DEFAULT_GAMMA_SHAPE
    initial: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigError(
                f"need iterations > burn_in >= 0, got iterations={self.iterations}, burn_in={self.burn_in}"
            )
        if self.thin < 1:
            raise ConfigError(f"thin must be >= 1, got {self.thin}")
        for name in ("kappa_scale", "sigma_scale"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if not self.gamma_shape > 1:
            raise ConfigError(f"gamma_shape must exceed 1 for a mode to exist, got {self.gamma_shape}")

    @property
    def retained(self) -> int:
        return len(range(self.burn_in, self.iterations, self.thin))


@dataclass(frozen=True)
class ChainOutput:
    kappa: np.ndarray = field(compare=False, repr=False)
    sigma: np.ndarray = field(compare=False, repr=False)
    iteration: np.ndarray = field(compare=False, repr=False)
    acceptance_kappa: float
    acceptance_sigma: float
    retained: int
    x_max: float
    seed: int

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"iteration": self.iteration, "kappa": self.kappa, "sigma": self.sigma})


def log_prior(kappa: float, sigma: float) -> float:
    """Log Jeffreys prior; -inf outside kappa < 1/2, sigma > 0."""
    if not (kappa < KAPPA_LIMIT and sigma > 0):
        return -math.inf
    return -math.log(sigma) - math.log1p(-kappa) - 0.5 * math.log1p(-2.0 * kappa)


def log_posterior(kappa: float, sigma: float, sample) -> float:
    """Unnormalised log posterior; -inf outside the joint support."""
    lp = log_prior(kappa, sigma)
    if lp == -math.inf:
        return lp
    return lp + gpd_loglik(kappa, sigma, sample)


def mh_step(current: float, current_log_target: float, log_target: Callable[[float], float],
            propose: Proposal, rng: np.random.Generator) -> Tuple[float, float, bool]:
    """One Metropolis-Hastings transition.

    `propose(current, rng)` returns (candidate, log q(candidate | current),
    log q(current | candidate)). Returns the new state, its log target and
    whether the candidate was accepted.
    """
    candidate, log_q_forward, log_q_reverse = propose(current, rng)
    candidate_log_target = log_target(candidate)
    if not candidate_log_target > -math.inf:
        return current, current_log_target, False
    log_ratio = candidate_log_target - current_log_target + log_q_reverse - log_q_forward
    if log_ratio >= 0 or rng.random() < math.exp(log_ratio):
        return candidate, candidate_log_target, True
    return current, current_log_target, False


def _uniform_log(rng: np.random.Generator) -> float:
    return math.log(1.0 - rng.random())


def _kappa_proposal(mode: float, scale: float, upper: float) -> Proposal:
    """Independence Gaussian at `mode` truncated to (-inf, upper]."""
    log_mass = float(log_ndtr((upper - mode) / scale))

    def propose(current, rng):
        candidate = min(mode + scale * float(ndtri_exp(_uniform_log(rng) + log_mass)), upper)
        z_new = (candidate - mode) / scale
        z_old = (current - mode) / scale
        return candidate, -0.5 * z_new * z_new - log_mass, -0.5 * z_old * z_old - log_mass

    return propose


def _sigma_gamma_proposal(shape: float) -> Proposal:
    """Gamma with mode at the current value: rate (shape - 1)/current."""

    def log_density(value, rate):
        return shape * math.log(rate) - gammaln(shape) + (shape - 1.0) * math.log(value) - rate * value

    def propose(current, rng):
        rate = (shape - 1.0) / current
        candidate = float(rng.gamma(shape, 1.0 / rate))
        reverse_rate = (shape - 1.0) / candidate
        return candidate, log_density(candidate, rate), log_density(current, reverse_rate)

    return propose


def _sigma_gaussian_proposal(scale: float, lower: float) -> Proposal:
    """Gaussian at the current value truncated to [lower, inf)."""

    def log_density(value, centre):
        z = (value - centre) / scale
        return -0.5 * z * z - float(log_ndtr((centre - lower) / scale))

    def propose(current, rng):
        log_mass = float(log_ndtr((current - lower) / scale))
        candidate = max(current - scale * float(ndtri_exp(_uniform_log(rng) + log_mass)), lower)
        return candidate, log_density(candidate, current), log_density(current, candidate)

    return propose


def _initial_state(config: ChainConfig, mle_kappa: float, mle_sigma: float,
                   x_max: float) -> Tuple[float, float]:
    if config.initial is not None:
        return tuple(float(v) for v in config.initial)
    kappa0 = min(mle_kappa, INITIAL_KAPPA_CAP)
    sigma0 = mle_sigma
    if kappa0 > 0 and sigma0 <= kappa0 * x_max:
        sigma0 = 1.01 * kappa0 * x_max
    return kappa0, sigma0


def run_chain(sample, config: ChainConfig = ChainConfig()) -> ChainOutput:
    """Sample the Jeffreys posterior of (kappa, sigma) given GPD data."""
    x = positive_sample(sample)
    x_max = float(x.max())
    mle = gpd_mle(x)
    kappa_scale = config.kappa_scale or (
        2.0 * mle.se_kappa if mle.se_kappa else FALLBACK_KAPPA_SCALE)
    sigma_scale = config.sigma_scale or (
        2.0 * mle.se_sigma if mle.se_sigma else FALLBACK_SIGMA_FRACTION * mle.sigma)

    kappa, sigma = _initial_state(config, mle.kappa, mle.sigma, x_max)
    current = log_posterior(kappa, sigma, x)
    if current == -math.inf:
        raise ConfigError(f"initial state ({kappa:.4g}, {sigma:.4g}) lies outside the posterior support")

    logger.info(
        "Running Jeffreys chain: n=%d, %d iterations, burn-in %d, thin %d, seed %d",
        x.size, config.iterations, config.burn_in, config.thin, config.seed,
    )
    rng = np.random.default_rng(config.seed)
    gamma_step = _sigma_gamma_proposal(config.gamma_shape)
    retained = config.retained
    kappa_draws = np.empty(retained)
    sigma_draws = np.empty(retained)
    iterations = np.empty(retained, dtype=np.int64)
    accepted_kappa = accepted_sigma = 0
    slot = 0

    for it in range(config.iterations):
        kappa_step = _kappa_proposal(mle.kappa, kappa_scale, min(KAPPA_LIMIT, sigma / x_max))
        kappa, current, ok_kappa = mh_step(
            kappa, current, lambda k: log_posterior(k, sigma, x), kappa_step, rng)

        sigma_step = gamma_step if kappa < 0 else _sigma_gaussian_proposal(sigma_scale, kappa * x_max)
        sigma, current, ok_sigma = mh_step(
            sigma, current, lambda s: log_posterior(kappa, s, x), sigma_step, rng)

        if it < config.burn_in:
            continue
        accepted_kappa += ok_kappa
        accepted_sigma += ok_sigma
        if (it - config.burn_in) % config.thin == 0:
            kappa_draws[slot] = kappa
            sigma_draws[slot] = sigma
            iterations[slot] = it + 1
            slot += 1

    counted = config.iterations - config.burn_in
    rate_kappa = accepted_kappa / counted
    rate_sigma = accepted_sigma / counted
    if accepted_kappa == 0 and accepted_sigma == 0:
        raise ChainDiagnosticsError("every proposal after burn-in was rejected; retune proposal scales")
    if accepted_kappa == 0 or accepted_sigma == 0:
        logger.warning("One coordinate never moved (acceptance kappa %.3f, sigma %.3f)",
                       rate_kappa, rate_sigma)
    logger.info("Chain done: %d draws retained, acceptance kappa %.3f, sigma %.3f",
                retained, rate_kappa, rate_sigma)

    for arr in (kappa_draws, sigma_draws, iterations):
        arr.setflags(write=False)
    return ChainOutput(kappa=kappa_draws, sigma=sigma_draws, iteration=iterations,
                       acceptance_kappa=rate_kappa, acceptance_sigma=rate_sigma,
                       retained=retained, x_max=x_max, seed=config.seed)


def write_chain_csv(output: ChainOutput, path: str):
    """Write retained draws as iteration, kappa, sigma."""
    output.to_frame().to_csv(path, index=False, float_format="%.10g")
    logger.info("Wrote %d draws to %s", output.retained, path)
