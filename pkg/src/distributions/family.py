"""
Generalised Pareto family of distributions

Evaluation, inversion and sampling for the GPD and its relatives:
- GPD(kappa, sigma): density (1/sigma)(1 - kappa*x/sigma)^(1/kappa - 1).
  Heavy tails are kappa < 0; the usual extreme-value shape is xi = -kappa.
- Pareto(alpha, beta) on [beta, inf) and InvPareto(alpha, beta) on (0, beta]
- LocExp(alpha, theta) on [theta, inf), Exponential(rate), Uniform(upper)

Evaluation delegates to the equivalent frozen scipy.stats law (`law`).
Every evaluation function accepts a scalar or an array-like and returns a
float or an ndarray of the same shape. Samplers use inverse-CDF only, so a
seeded numpy Generator fully determines the draws.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Type, Union

import numpy as np
from scipy import stats as sps

from src.errors import DomainError, MomentExistenceError, ParameterDomainError

logger = logging.getLogger(__name__)


def _check_positive(name: str, value: float):
    """Raise ParameterDomainError unless value is finite and > 0."""
    if not (math.isfinite(value) and value > 0):
        raise ParameterDomainError(f"{name} must be a positive finite real, got {value!r}")


@dataclass(frozen=True)
class GPD:
    kappa: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.kappa):
            raise ParameterDomainError(f"kappa must be finite, got {self.kappa!r}")
        _check_positive("sigma", self.sigma)

    @property
    def upper(self) -> float:
        """Right end of the support (inf for kappa <= 0)."""
        return self.sigma / self.kappa if self.kappa > 0 else math.inf


@dataclass(frozen=True)
class Pareto:
    alpha: float
    beta: float

    def __post_init__(self):
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)


@dataclass(frozen=True)
class InvPareto:
    alpha: float
    beta: float

    def __post_init__(self):
        _check_positive("alpha", self.alpha)
        _check_positive("beta", self.beta)


@dataclass(frozen=True)
class LocExp:
    alpha: float
    theta: float

    def __post_init__(self):
        _check_positive("alpha", self.alpha)
        if not math.isfinite(self.theta):
            raise ParameterDomainError(f"theta must be finite, got {self.theta!r}")


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        _check_positive("rate", self.rate)


@dataclass(frozen=True)
class Uniform:
    upper: float

    def __post_init__(self):
        _check_positive("upper", self.upper)


DistSpec = Union[GPD, Pareto, InvPareto, LocExp, Exponential, Uniform]


@dataclass(frozen=True)
class Mapping:
    """An equivalent parameterisation reached through a change of variable."""
    target: DistSpec
    variable_change: str
    forward: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)


def law(dist: DistSpec):
    """Frozen scipy.stats distribution equivalent to dist.

    GPD(kappa, sigma) is genpareto with c = -kappa; InvPareto is the
    power-function law on (0, beta].
    """
    if isinstance(dist, GPD):
        return sps.genpareto(c=-dist.kappa, scale=dist.sigma)
    if isinstance(dist, Pareto):
        return sps.pareto(dist.alpha, scale=dist.beta)
    if isinstance(dist, InvPareto):
        return sps.powerlaw(dist.alpha, scale=dist.beta)
    if isinstance(dist, LocExp):
        return sps.expon(loc=dist.theta, scale=1.0 / dist.alpha)
    if isinstance(dist, Exponential):
        return sps.expon(scale=1.0 / dist.rate)
    if isinstance(dist, Uniform):
        return sps.uniform(scale=dist.upper)
    raise ParameterDomainError(f"Unknown distribution {dist!r}")


def _evaluate(method: Callable, x):
    arr = np.asarray(x, dtype=float)
    out = np.asarray(method(arr), dtype=float)
    return float(out) if arr.ndim == 0 else out


def density(dist: DistSpec, x):
    """Probability density at x; zero outside the support."""
    return _evaluate(law(dist).pdf, x)


def cdf(dist: DistSpec, x):
    """Cumulative distribution function, 0 below and 1 above the support."""
    return _evaluate(law(dist).cdf, x)


def quantile(dist: DistSpec, p):
    """Inverse CDF for p strictly inside (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise DomainError(f"quantile requires 0 < p < 1, got {p!r}")
    return _evaluate(law(dist).ppf, arr)


def sample(dist: DistSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. values by inversion, in draw order."""
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    u = rng.random(int(n))
    u[u == 0.0] = np.finfo(float).tiny
    return law(dist).ppf(u)


def transform(dist: DistSpec, target: Optional[Type] = None) -> List[Mapping]:
    """Equivalent parameterisations of dist under a change of variable.

    With target set to a variant class, only mappings onto that variant are
    returned; an empty result is a DomainError.
    """
    maps: List[Mapping] = []
    if isinstance(dist, GPD):
        k, s = dist.kappa, dist.sigma
        if k == 0.0:
            maps.append(Mapping(Exponential(1.0 / s), "x", lambda x: np.asarray(x, dtype=float)))
        elif k > 0:
            maps.append(Mapping(InvPareto(1.0 / k, s), "y = sigma - kappa*x", lambda x: s - k * np.asarray(x)))
            if k == 1.0:
                maps.append(Mapping(Uniform(s), "x", lambda x: np.asarray(x, dtype=float)))
        else:
            maps.append(Mapping(Pareto(-1.0 / k, s), "y = sigma - kappa*x", lambda x: s - k * np.asarray(x)))
    elif isinstance(dist, Pareto):
        a, b = dist.alpha, dist.beta
        maps.append(Mapping(GPD(-1.0 / a, b / a), "z = y - beta", lambda y: np.asarray(y) - b))
        maps.append(Mapping(GPD(-1.0 / a, b), "x = alpha*(y - beta)", lambda y: a * (np.asarray(y) - b)))
        maps.append(Mapping(InvPareto(a, 1.0 / b), "y' = 1/y", lambda y: 1.0 / np.asarray(y)))
    elif isinstance(dist, InvPareto):
        a, b = dist.alpha, dist.beta
        maps.append(Mapping(GPD(1.0 / a, b), "x = alpha*(beta - y)", lambda y: a * (b - np.asarray(y))))
        # z = -log y ~ LocExp(alpha, -log beta); z = log(beta/y) is its zero-location form
        maps.append(Mapping(LocExp(a, -math.log(b)), "z = -log y", lambda y: -np.log(y)))
        maps.append(Mapping(Exponential(a), "z = log(beta/y)", lambda y: np.log(b / np.asarray(y))))
        if a == 1.0:
            maps.append(Mapping(Uniform(b), "y", lambda y: np.asarray(y, dtype=float)))
    else:
        raise DomainError(f"transform is defined for GPD, Pareto and InvPareto, not {type(dist).__name__}")

    if target is not None:
        maps = [m for m in maps if isinstance(m.target, target)]
        if not maps:
            raise DomainError(f"No {target.__name__} mapping exists for {dist!r}")
    return maps


def mean_excess(dist: DistSpec, t: float) -> float:
    """E[X - t | X > t] for t inside the support."""
    if isinstance(dist, GPD):
        if dist.kappa <= -1:
            raise MomentExistenceError(f"GPD mean excess needs kappa > -1, got {dist.kappa}")
        if not 0 <= t < dist.upper:
            raise DomainError(f"t={t} outside the GPD support")
        return (dist.sigma - dist.kappa * t) / (1.0 + dist.kappa)
    if isinstance(dist, Pareto):
        if dist.alpha <= 1:
            raise MomentExistenceError(f"Pareto mean excess needs alpha > 1, got {dist.alpha}")
        if t < dist.beta:
            raise DomainError(f"t={t} below the Pareto scale {dist.beta}")
        return t / (dist.alpha - 1.0)
    if isinstance(dist, InvPareto):
        if not 0 < t < dist.beta:
            raise DomainError(f"t={t} outside the inverted-Pareto support")
        a, b = dist.alpha, dist.beta
        r = t / b
        tail = -math.expm1(a * math.log(r))
        integral = (b - t) - b * (-math.expm1((a + 1.0) * math.log(r))) / (a + 1.0)
        return integral / tail
    if isinstance(dist, LocExp):
        if t < dist.theta:
            raise DomainError(f"t={t} below the location {dist.theta}")
        return 1.0 / dist.alpha
    if isinstance(dist, Exponential):
        if t < 0:
            raise DomainError(f"t={t} outside the exponential support")
        return 1.0 / dist.rate
    if isinstance(dist, Uniform):
        if not 0 <= t < dist.upper:
            raise DomainError(f"t={t} outside the uniform support")
        return (dist.upper - t) / 2.0
    raise ParameterDomainError(f"Unknown distribution {dist!r}")


def moments(dist: DistSpec) -> Tuple[float, float]:
    """(mean, variance); variance is inf when only the mean exists."""
    if isinstance(dist, GPD):
        k, s = dist.kappa, dist.sigma
        if k <= -1:
            raise MomentExistenceError(f"GPD mean needs kappa > -1, got {k}")
        var = math.inf if k <= -0.5 else s * s / ((1 + k) ** 2 * (1 + 2 * k))
        return s / (1 + k), var
    if isinstance(dist, Pareto):
        a, b = dist.alpha, dist.beta
        if a <= 1:
            raise MomentExistenceError(f"Pareto mean needs alpha > 1, got {a}")
        var = math.inf if a <= 2 else b * b * a / ((a - 1) ** 2 * (a - 2))
        return a * b / (a - 1), var
    if isinstance(dist, InvPareto):
        a, b = dist.alpha, dist.beta
        return a * b / (a + 1), a * b * b / ((a + 1) ** 2 * (a + 2))
    if isinstance(dist, LocExp):
        return dist.theta + 1.0 / dist.alpha, 1.0 / dist.alpha ** 2
    if isinstance(dist, Exponential):
        return 1.0 / dist.rate, 1.0 / dist.rate ** 2
    if isinstance(dist, Uniform):
        return dist.upper / 2.0, dist.upper ** 2 / 12.0
    raise ParameterDomainError(f"Unknown distribution {dist!r}")
