"""
gpdcal: command-line front end for GPD calibration

Subcommands:
    returns      prices -> non-overlapping returns (or their histogram counts)
    mean-excess  empirical mean-excess series with a normal band
    fit          calibrate a positive sample by BRI, MLE, PWM and/or Jeffreys MCMC
    pot          prices -> tail over a threshold -> four-method kappa/Gini/VaR table
    posterior    prices -> tail over a threshold -> BRI and Jeffreys shape densities
    simulate     Monte Carlo bias/MSE study of BRI, MLE and PWM on Pareto data

Exit status: 0 on success, 1 for data or numeric errors, 2 for usage errors.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.classical.likelihood import gpd_mle
from src.classical.pwm import pwm_fit
from src.cli.emit import FORMATS, build_metadata, emit, load_column
from src.errors import CalibrationError
from src.evt.compare import DEFAULT_EPSILON, DEFAULT_THRESHOLD, METHODS, fit_tail_all
from src.evt.density import DEFAULT_BINS, DEFAULT_POINTS, DENSITY_METHODS, posterior_grid
from src.evt.pot import (
    DEFAULT_HORIZON, RETURN_KINDS, empirical_mean_excess, histogram_counts,
    mean_excess_grid, prices_to_returns,
)
from src.intrinsic.bri import MODES, NUMERIC, bri_scale, fit_bri_shape
from src.intrinsic.stats import suff_stats
from src.jeffreys_mcmc.chain import ChainConfig, run_chain, write_chain_csv
from src.jeffreys_mcmc.summary import summarize
from src.simstudy.study import ERROR_SCALES, GPD_SHAPE_ERROR, STUDY_METHODS, StudyConfig, run_study

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
DEFAULT_LEVEL = 0.95
FIT_COLUMNS = ["method", "parameter", "kappa_lo", "kappa", "kappa_hi", "sigma", "n"]
CHAIN_FLAGS = ("iterations", "burn_in", "thin", "kappa_scale", "sigma_scale", "chain_output")


class UsageError(Exception):
    """Inconsistent or empty command-line selections."""


def _parse_methods(text: str, allowed: Sequence[str]) -> Tuple[str, ...]:
    chosen = {m.strip().lower() for m in text.split(",") if m.strip()}
    if not chosen:
        raise UsageError("method set is empty")
    unknown = chosen.difference(allowed)
    if unknown:
        raise UsageError(f"unknown methods {sorted(unknown)}; choose from {', '.join(allowed)}")
    return tuple(m for m in allowed if m in chosen)


def _chain_config(args, methods: Tuple[str, ...]) -> ChainConfig:
    given = [f for f in CHAIN_FLAGS if getattr(args, f, None) is not None]
    if given and "jeffreys" not in methods:
        flags = ", ".join("--" + f.replace("_", "-") for f in given)
        raise UsageError(f"{flags} only apply with the jeffreys method")
    defaults = ChainConfig()
    return ChainConfig(
        iterations=args.iterations if args.iterations is not None else defaults.iterations,
        burn_in=args.burn_in if args.burn_in is not None else defaults.burn_in,
        thin=args.thin if args.thin is not None else defaults.thin,
        seed=args.seed,
        kappa_scale=args.kappa_scale,
        sigma_scale=args.sigma_scale,
    )


# --- subcommands ---

def cmd_returns(args) -> pd.DataFrame:
    series = prices_to_returns(load_column(args.input), horizon=args.horizon, kind=args.kind)
    if args.histogram_bins is not None:
        return histogram_counts(series.values, bins=args.histogram_bins)
    return pd.DataFrame({"period": np.arange(1, len(series) + 1), "return": series.values})


def cmd_mean_excess(args) -> pd.DataFrame:
    values = load_column(args.input)
    if args.prices:
        returns = prices_to_returns(values, horizon=args.horizon, kind=args.kind).values
        values = -returns[returns < 0]
    grid = mean_excess_grid(values, points=args.points)
    return empirical_mean_excess(values, grid, level=args.level)


def cmd_fit(args) -> pd.DataFrame:
    methods = _parse_methods(args.methods, METHODS)
    config = _chain_config(args, methods)
    x = load_column(args.input)
    rows = []
    for method in methods:
        if method == "bri":
            stats = suff_stats(x)
            fit = fit_bri_shape(stats, p=args.level, mode=args.bri_mode)
            rows.append({"method": "bri", "parameter": fit.parameter, "kappa_lo": fit.interval[0],
                         "kappa": fit.point, "kappa_hi": fit.interval[1],
                         "sigma": bri_scale(stats, mode=args.bri_mode), "n": stats.n})
        elif method in ("mle", "pwm"):
            fit = gpd_mle(x, level=args.level) if method == "mle" else pwm_fit(x, level=args.level)
            lo, hi = fit.ci_kappa if fit.ci_kappa is not None else (float("nan"), float("nan"))
            rows.append({"method": method, "parameter": "gpd-shape", "kappa_lo": lo,
                         "kappa": fit.kappa, "kappa_hi": hi, "sigma": fit.sigma, "n": fit.n})
        else:
            chain = run_chain(x, config)
            if args.chain_output:
                write_chain_csv(chain, args.chain_output)
            summary = summarize(chain, p=args.level)
            rows.append({"method": "jeffreys", "parameter": "gpd-shape",
                         "kappa_lo": summary.kappa.lower, "kappa": summary.kappa.median,
                         "kappa_hi": summary.kappa.upper, "sigma": summary.sigma.median,
                         "n": int(x.size)})
    return pd.DataFrame(rows, columns=FIT_COLUMNS)


def cmd_pot(args) -> pd.DataFrame:
    methods = _parse_methods(args.methods, METHODS)
    config = _chain_config(args, methods)
    returns = prices_to_returns(load_column(args.input), horizon=args.horizon, kind=args.kind)
    return fit_tail_all(returns, args.threshold, methods=methods, chain_config=config,
                        epsilon=args.epsilon, level=args.level, bri_mode=args.bri_mode)


def cmd_posterior(args) -> pd.DataFrame:
    methods = _parse_methods(args.methods, DENSITY_METHODS)
    config = _chain_config(args, methods)
    returns = prices_to_returns(load_column(args.input), horizon=args.horizon, kind=args.kind)
    return posterior_grid(returns, args.threshold, methods=methods, chain_config=config,
                          points=args.points, bins=args.bins)


def cmd_simulate(args) -> pd.DataFrame:
    methods = _parse_methods(args.methods, STUDY_METHODS)
    config = StudyConfig(kappas=tuple(args.kappa), sigma=args.sigma, sizes=tuple(args.n),
                         replications=args.reps, methods=methods, seed=args.seed,
                         error_scale=args.error_scale, bri_mode=args.bri_mode)
    return run_study(config)


COMMANDS: Dict[str, Callable[[argparse.Namespace], pd.DataFrame]] = {
    "returns": cmd_returns,
    "mean-excess": cmd_mean_excess,
    "fit": cmd_fit,
    "pot": cmd_pot,
    "posterior": cmd_posterior,
    "simulate": cmd_simulate,
}


# --- parser ---

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="csv", help="Output format")
    common.add_argument("--output", type=str, default=None, help="Output file path (stdout when omitted)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    return common


def _add_return_options(parser: argparse.ArgumentParser):
    parser.add_argument("--horizon", type=int, default=DEFAULT_HORIZON, help="Trading days per return")
    parser.add_argument("--kind", choices=RETURN_KINDS, default="log", help="Return kind")


def _add_chain_options(parser: argparse.ArgumentParser, with_output: bool = False):
    group = parser.add_argument_group("Jeffreys chain")
    group.add_argument("--iterations", type=int, default=None, help="Chain length (default 1000000)")
    group.add_argument("--burn-in", type=int, default=None, help="Draws dropped (default 10000)")
    group.add_argument("--thin", type=int, default=None, help="Keep every k-th draw (default 5)")
    group.add_argument("--kappa-scale", type=float, default=None, help="Shape proposal sd")
    group.add_argument("--sigma-scale", type=float, default=None, help="Scale proposal sd")
    if with_output:
        group.add_argument("--chain-output", type=str, default=None, help="Write chain draws to this CSV")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="gpdcal", description="GPD calibration: BRI, MLE, PWM and Jeffreys MCMC")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("returns", parents=[common], help="Non-overlapping returns from prices")
    p.add_argument("--input", required=True, help="CSV with a price column")
    _add_return_options(p)
    p.add_argument("--histogram-bins", type=int, default=None, help="Emit binned counts instead of the series")

    p = sub.add_parser("mean-excess", parents=[common], help="Empirical mean-excess series")
    p.add_argument("--input", required=True, help="CSV with the sample (or prices with --prices)")
    p.add_argument("--prices", action="store_true", help="Input holds prices; use the return losses")
    _add_return_options(p)
    p.add_argument("--points", type=int, default=50, help="Grid size")
    p.add_argument("--level", type=float, default=DEFAULT_LEVEL, help="Band coverage")

    p = sub.add_parser("fit", parents=[common], help="Calibrate a positive sample")
    p.add_argument("--input", required=True, help="CSV with the sample")
    p.add_argument("--methods", "--method", dest="methods", default="mle,pwm",
                   help=f"Comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--level", type=float, default=DEFAULT_LEVEL, help="Interval probability")
    p.add_argument("--bri-mode", choices=MODES, default=NUMERIC, help="BRI evaluation mode")
    _add_chain_options(p, with_output=True)

    p = sub.add_parser("pot", parents=[common], help="Peaks-over-threshold comparison table")
    p.add_argument("--input", required=True, help="CSV with a price column")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="Loss threshold u")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="VaR level")
    p.add_argument("--methods", "--method", dest="methods", default=",".join(METHODS),
                   help=f"Comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--level", type=float, default=DEFAULT_LEVEL, help="Interval probability")
    p.add_argument("--bri-mode", choices=MODES, default=NUMERIC, help="BRI evaluation mode")
    _add_return_options(p)
    _add_chain_options(p)

    p = sub.add_parser("posterior", parents=[common], help="Posterior shape densities over a threshold")
    p.add_argument("--input", required=True, help="CSV with a price column")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="Loss threshold u")
    p.add_argument("--methods", "--method", dest="methods", default=",".join(DENSITY_METHODS),
                   help=f"Comma-separated subset of {','.join(DENSITY_METHODS)}")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS, help="BRI grid size")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS, help="Jeffreys histogram bins")
    _add_return_options(p)
    _add_chain_options(p)

    p = sub.add_parser("simulate", parents=[common], help="Bias/MSE study on Pareto data")
    p.add_argument("--kappa", type=float, nargs="+", default=[1.0 / 3.0, 3.0, 7.0], help="Pareto shapes")
    p.add_argument("--n", type=int, nargs="+", default=[15, 50, 100], help="Sample sizes")
    p.add_argument("--reps", type=int, default=5000, help="Replications per cell")
    p.add_argument("--sigma", type=float, default=4.0, help="Pareto scale")
    p.add_argument("--methods", "--method", dest="methods", default=",".join(STUDY_METHODS),
                   help=f"Comma-separated subset of {','.join(STUDY_METHODS)}")
    p.add_argument("--error-scale", choices=ERROR_SCALES, default=GPD_SHAPE_ERROR, help="Error scale")
    p.add_argument("--bri-mode", choices=MODES, default=NUMERIC, help="BRI evaluation mode")
    return parser


def _configure_logging(verbose: bool, quiet: bool = False):
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s",
                        stream=sys.stderr)
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.getLogger().setLevel(level)


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    _configure_logging(args.verbose, args.quiet)

    options = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "verbose", "quiet")}
    try:
        table = COMMANDS[args.command](args)
        if table.attrs:
            options["derived"] = {k: table.attrs[k] for k in sorted(table.attrs)}
        emit(table, args.format, build_metadata(args.command, args.seed, options), args.output)
    except UsageError as e:
        logger.error("%s: %s", args.command, e)
        return 2
    except (CalibrationError, ValueError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        return 1
    return 0


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
