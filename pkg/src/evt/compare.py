"""
Four-method tail comparison on a return series

For a threshold u the losses beyond u are calibrated by

- bri:      inverted Pareto on the reciprocals 1/x of the exceedances, mapped
            to the GPD by kappa = -1/alpha, sigma = (1/sigma_ip)/alpha
- mle, pwm: the GPD fitted to the excesses x - u
- jeffreys: posterior medians of the Jeffreys chain on the excesses

and each row carries the shape with its interval, the Gini index with the
interval mapped through 1/(kappa + 2), and VaR in log-loss and simple-loss units.
"""

import logging
from typing import Iterable, Optional, Sequence, Tuple

import pandas as pd

from src.classical.likelihood import gpd_mle
from src.classical.pwm import pwm_fit
from src.classical.result import DEFAULT_LEVEL, FitResult
from src.errors import DomainError
from src.evt.inequality import gini_index
from src.evt.pot import DEFAULT_HORIZON, ReturnSeries, TailData, prices_to_returns, tail_exceedances
from src.evt.risk import to_simple_loss, var_quantile
from src.intrinsic.bri import NUMERIC, bri_scale, fit_bri_shape, to_gpd
from src.intrinsic.stats import suff_stats
from src.jeffreys_mcmc.chain import ChainConfig, run_chain
from src.jeffreys_mcmc.summary import summarize

logger = logging.getLogger(__name__)

METHODS = ("bri", "mle", "pwm", "jeffreys")
DEFAULT_THRESHOLD = 0.05
DEFAULT_EPSILON = 0.99
COMPARISON_COLUMNS = [
    "method", "kappa_lo", "kappa", "kappa_hi", "sigma",
    "gini_lo", "gini", "gini_hi", "var", "var_simple",
]

NAN = float("nan")


def resolve_methods(methods: Iterable[str]) -> Tuple[str, ...]:
    """Normalise a method selection to the canonical order."""
    chosen = {m.strip().lower() for m in methods if m.strip()}
    if not chosen:
        raise DomainError("method set is empty")
    unknown = chosen.difference(METHODS)
    if unknown:
        raise DomainError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
    return tuple(m for m in METHODS if m in chosen)


def _gini_triple(kappa: float, interval: Optional[Tuple[float, float]]) -> Tuple[float, float, float]:
    if kappa <= -1:
        return NAN, NAN, NAN
    point = gini_index(kappa)
    if interval is None or interval[0] <= -1:
        return NAN, point, NAN
    lo, hi = sorted((gini_index(interval[0]), gini_index(interval[1])))
    return lo, point, hi


def _row(method: str, kappa: float, interval, sigma: float, tail: TailData, epsilon: float) -> dict:
    gini_lo, gini, gini_hi = _gini_triple(kappa, interval)
    var = var_quantile(epsilon, tail.threshold, kappa, sigma, tail.f_tilde)
    lo, hi = interval if interval is not None else (NAN, NAN)
    return {
        "method": method, "kappa_lo": lo, "kappa": kappa, "kappa_hi": hi, "sigma": sigma,
        "gini_lo": gini_lo, "gini": gini, "gini_hi": gini_hi,
        "var": var, "var_simple": to_simple_loss(var),
    }


def _bri_row(tail: TailData, level: float, epsilon: float, mode: str) -> dict:
    stats = suff_stats(1.0 / tail.exceedances)
    shape = to_gpd(fit_bri_shape(stats, p=level, mode=mode))
    alpha = -1.0 / shape.point
    sigma = (1.0 / bri_scale(stats, mode=mode)) / alpha
    return _row("bri", shape.point, shape.interval, sigma, tail, epsilon)


def _classical_row(fit: FitResult, tail: TailData, epsilon: float) -> dict:
    return _row(fit.method.lower(), fit.kappa, fit.ci_kappa, fit.sigma, tail, epsilon)


def _jeffreys_row(tail: TailData, level: float, epsilon: float, config: ChainConfig) -> dict:
    chain = run_chain(tail.excesses, config)
    summary = summarize(chain, p=level, threshold=tail.threshold,
                        f_tilde=tail.f_tilde, epsilon=epsilon)
    kappa = summary.kappa
    row = _row("jeffreys", kappa.median, (kappa.lower, kappa.upper),
               summary.sigma.median, tail, epsilon)
    if summary.gini is not None:
        row.update(gini_lo=summary.gini.lower, gini=summary.gini.median, gini_hi=summary.gini.upper)
    row.update(var=summary.var.median, var_simple=to_simple_loss(summary.var.median))
    return row


def fit_tail_all(returns: ReturnSeries, u: float = DEFAULT_THRESHOLD,
                 methods: Sequence[str] = METHODS, chain_config: Optional[ChainConfig] = None,
                 epsilon: float = DEFAULT_EPSILON, level: float = DEFAULT_LEVEL,
                 bri_mode: str = NUMERIC) -> pd.DataFrame:
    """Comparison table, one row per method in canonical order."""
    chosen = resolve_methods(methods)
    tail = tail_exceedances(returns, u)
    rows = []
    for method in chosen:
        logger.info("Calibrating %d exceedances with %s", tail.n_tail, method)
        if method == "bri":
            rows.append(_bri_row(tail, level, epsilon, bri_mode))
        elif method == "mle":
            rows.append(_classical_row(gpd_mle(tail.excesses, level=level), tail, epsilon))
        elif method == "pwm":
            rows.append(_classical_row(pwm_fit(tail.excesses, level=level), tail, epsilon))
        else:
            rows.append(_jeffreys_row(tail, level, epsilon, chain_config or ChainConfig()))
    table = pd.DataFrame(rows, columns=COMPARISON_COLUMNS)
    table.attrs.update(threshold=tail.threshold, n_tail=tail.n_tail, n_total=tail.n_total,
                       f_tilde=tail.f_tilde, epsilon=epsilon)
    return table


def run_pot(prices, u: float = DEFAULT_THRESHOLD, horizon: int = DEFAULT_HORIZON,
            kind: str = "log", **kwargs) -> pd.DataFrame:
    """Prices -> non-overlapping returns -> tail -> comparison table."""
    returns = prices_to_returns(prices, horizon=horizon, kind=kind)
    return fit_tail_all(returns, u, **kwargs)
