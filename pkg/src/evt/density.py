"""
Posterior densities of the GPD shape over a threshold

- bri:      the reference posterior Ga(n - 1, n/alpha_hat) of the inverted-Pareto
            shape on the reciprocal exceedances, carried to kappa = -1/alpha with
            the Jacobian alpha**2
- jeffreys: a normalised histogram of the chain's kappa draws on the excesses

Rows are (method, kappa, density) with kappa ascending within each method.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import DomainError
from src.evt.compare import DEFAULT_THRESHOLD, resolve_methods
from src.evt.pot import DEFAULT_HORIZON, ReturnSeries, prices_to_returns, tail_exceedances
from src.intrinsic.bri import reference_posterior
from src.intrinsic.stats import ip_mle, suff_stats
from src.jeffreys_mcmc.chain import ChainConfig, run_chain

logger = logging.getLogger(__name__)

DENSITY_METHODS = ("bri", "jeffreys")
DENSITY_COLUMNS = ["method", "kappa", "density"]
DEFAULT_POINTS = 200
DEFAULT_BINS = 50
GRID_MASS = (0.0005, 0.9995)


def reference_shape_density(n: int, alpha_hat: float,
                            points: int = DEFAULT_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """Reference posterior density of kappa = -1/alpha on an even kappa grid.

    The grid spans the central GRID_MASS of the posterior, so it carries all
    but 0.1% of the mass.
    """
    if points < 2:
        raise DomainError(f"need at least 2 grid points, got {points}")
    posterior = reference_posterior(n, alpha_hat)
    alpha_lo, alpha_hi = posterior.ppf(np.asarray(GRID_MASS))
    kappa = np.linspace(-1.0 / alpha_lo, -1.0 / alpha_hi, points)
    alpha = -1.0 / kappa
    return kappa, posterior.pdf(alpha) * alpha ** 2


def chain_shape_histogram(draws, bins: int = DEFAULT_BINS) -> Tuple[np.ndarray, np.ndarray]:
    """Bin centres and normalised heights of the kappa draws."""
    d = np.asarray(draws, dtype=float)
    if d.size == 0:
        raise DomainError("no draws to bin")
    if bins < 1:
        raise DomainError(f"bins must be positive, got {bins}")
    heights, edges = np.histogram(d, bins=bins, density=True)
    return 0.5 * (edges[:-1] + edges[1:]), heights


def posterior_grid(returns: ReturnSeries, u: float = DEFAULT_THRESHOLD,
                   methods: Sequence[str] = DENSITY_METHODS, chain_config: Optional[ChainConfig] = None,
                   points: int = DEFAULT_POINTS, bins: int = DEFAULT_BINS) -> pd.DataFrame:
    """Shape densities for the tail over u, one block per method."""
    chosen = resolve_methods(methods)
    unsupported = [m for m in chosen if m not in DENSITY_METHODS]
    if unsupported:
        raise DomainError(f"no posterior density for {unsupported}; choose from {DENSITY_METHODS}")
    tail = tail_exceedances(returns, u)
    blocks = []
    for method in chosen:
        logger.info("Posterior density of %d exceedances by %s", tail.n_tail, method)
        if method == "bri":
            stats = suff_stats(1.0 / tail.exceedances)
            kappa, density = reference_shape_density(stats.n, ip_mle(stats).kappa_hat, points)
        else:
            chain = run_chain(tail.excesses, chain_config or ChainConfig())
            kappa, density = chain_shape_histogram(chain.kappa, bins)
        blocks.append(pd.DataFrame({"method": method, "kappa": kappa, "density": density},
                                   columns=DENSITY_COLUMNS))
    table = pd.concat(blocks, ignore_index=True)
    table.attrs.update(threshold=tail.threshold, n_tail=tail.n_tail, n_total=tail.n_total,
                       f_tilde=tail.f_tilde)
    return table


def run_posterior(prices, u: float = DEFAULT_THRESHOLD, horizon: int = DEFAULT_HORIZON,
                  kind: str = "log", **kwargs) -> pd.DataFrame:
    """Prices -> non-overlapping returns -> tail -> shape densities."""
    returns = prices_to_returns(prices, horizon=horizon, kind=kind)
    return posterior_grid(returns, u, **kwargs)
